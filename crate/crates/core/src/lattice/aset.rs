use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::vector::{ExponentVector, LatticeVector};

/// The generating set `A = {a_1, ..., a_N}` in Z^n, with cached linear forms.
#[derive(Clone, Debug, PartialEq)]
pub struct ASet {
    dim: usize,
    vectors: Vec<Vec<i64>>,
    /// Integer form `h` with `h . a_i >= 1` for every generator.
    pointedness: Option<Vec<i64>>,
    nonconfluent: Option<Vec<BigRational>>,
    /// Nonzero integer forms with `h . a_i >= 0` for every generator; any of
    /// them with `h . beta < 0` certifies `beta` outside the cone of `A`.
    separating: Vec<Vec<i64>>,
    suffix_min: Vec<Vec<i64>>,
    suffix_max: Vec<Vec<i64>>,
    suffix_neg: Vec<Vec<i64>>,
    suffix_pos: Vec<Vec<i64>>,
}

const FORM_RADIUS: i64 = 3;
const SEPARATING_RADIUS: i64 = 2;

impl ASet {
    pub fn new(dim: usize, vectors: Vec<Vec<i64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "ambient dimension must be positive".into(),
            ));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidInput(
                "A must contain at least one vector".into(),
            ));
        }
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let nonconfluent = super::kernel::nonconfluence_form_of(&vectors, dim);
        let pointedness = match &nonconfluent {
            Some(h) => Some(clear_denominators(h)),
            None => search_form(&vectors, dim, |v| v >= 1),
        };
        let separating = small_forms(dim, SEPARATING_RADIUS.min(radius_for(dim)))
            .filter(|h| vectors.iter().all(|a| dot(h, a) >= 0))
            .collect();

        let big_n = vectors.len();
        let mut suffix_min = vec![vec![i64::MAX; dim]; big_n + 1];
        let mut suffix_max = vec![vec![i64::MIN; dim]; big_n + 1];
        let mut suffix_neg = vec![vec![0; dim]; big_n + 1];
        let mut suffix_pos = vec![vec![0; dim]; big_n + 1];
        for i in (0..big_n).rev() {
            for c in 0..dim {
                let x = vectors[i][c];
                suffix_min[i][c] = suffix_min[i + 1][c].min(x);
                suffix_max[i][c] = suffix_max[i + 1][c].max(x);
                suffix_neg[i][c] = suffix_neg[i + 1][c] + x.min(0);
                suffix_pos[i][c] = suffix_pos[i + 1][c] + x.max(0);
            }
        }
        Ok(ASet {
            dim,
            vectors,
            pointedness,
            nonconfluent,
            separating,
            suffix_min,
            suffix_max,
            suffix_neg,
            suffix_pos,
        })
    }

    /// Builds `A` from its rows, taking `n` from the first row.
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        ASet::new(dim, rows)
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of generators `N`.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[i64] {
        &self.vectors[i]
    }

    pub fn pointedness(&self) -> Option<&[i64]> {
        self.pointedness.as_deref()
    }

    pub fn nonconfluent_form(&self) -> Option<&[BigRational]> {
        self.nonconfluent.as_deref()
    }

    pub fn is_pointed(&self) -> bool {
        self.pointedness.is_some()
    }

    pub fn check_target(&self, beta: &LatticeVector) -> Result<()> {
        if beta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: beta.len(),
            });
        }
        Ok(())
    }

    pub fn check_exponents(&self, u: &ExponentVector) -> Result<()> {
        if u.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: u.len(),
            });
        }
        Ok(())
    }

    /// `sum_i u_i a_i`.
    pub fn combine(&self, u: &[u64]) -> LatticeVector {
        let mut out = vec![0i64; self.dim];
        for (a, &k) in self.vectors.iter().zip(u) {
            if k != 0 {
                for (o, &x) in out.iter_mut().zip(a) {
                    *o += k as i64 * x;
                }
            }
        }
        LatticeVector(out)
    }

    /// `sum_i l_i a_i` for a signed coefficient vector.
    pub fn combine_signed(&self, l: &[i64]) -> LatticeVector {
        let mut out = vec![0i64; self.dim];
        for (a, &k) in self.vectors.iter().zip(l) {
            for (o, &x) in out.iter_mut().zip(a) {
                *o += k * x;
            }
        }
        LatticeVector(out)
    }

    /// True when some cached form proves `beta` is not in the real cone of `A`.
    pub(crate) fn refutes(&self, beta: &[i64]) -> bool {
        if let Some(h) = &self.pointedness {
            if dot(h, beta) < 0 {
                return true;
            }
        }
        self.separating.iter().any(|h| dot(h, beta) < 0)
    }

    /// Largest total weight a representation of `beta` can have, when a
    /// pointedness witness exists.
    pub(crate) fn decision_level(&self, beta: &[i64]) -> Option<u64> {
        let h = self.pointedness.as_ref()?;
        let hb = dot(h, beta);
        if hb < 0 {
            return Some(0);
        }
        let hmin = self.vectors.iter().map(|a| dot(h, a)).min().unwrap_or(1);
        Some((hb / hmin) as u64)
    }

    pub(crate) fn suffix_bounds(&self, i: usize) -> (&[i64], &[i64]) {
        (&self.suffix_min[i], &self.suffix_max[i])
    }

    pub(crate) fn suffix_signed(&self, i: usize) -> (&[i64], &[i64]) {
        (&self.suffix_neg[i], &self.suffix_pos[i])
    }
}

pub(crate) fn dot(h: &[i64], a: &[i64]) -> i64 {
    h.iter().zip(a).map(|(x, y)| x * y).sum()
}

fn radius_for(dim: usize) -> i64 {
    match dim {
        0..=4 => FORM_RADIUS,
        5..=6 => 1,
        _ => 0,
    }
}

/// Nonzero integer vectors in `[-r, r]^dim`, ordered by sup-norm then lexicographically.
fn small_forms(dim: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as usize;
    let total = side.checked_pow(dim as u32).unwrap_or(0);
    let mut forms: Vec<Vec<i64>> = (0..total)
        .map(|mut idx| {
            (0..dim)
                .map(|_| {
                    let d = (idx % side) as i64 - r;
                    idx /= side;
                    d
                })
                .collect::<Vec<i64>>()
        })
        .filter(|h| h.iter().any(|&x| x != 0))
        .collect();
    forms.sort_by_key(|h| (h.iter().map(|x| x.abs()).max().unwrap_or(0), h.clone()));
    forms.into_iter()
}

fn search_form(vectors: &[Vec<i64>], dim: usize, accept: impl Fn(i64) -> bool) -> Option<Vec<i64>> {
    small_forms(dim, radius_for(dim)).find(|h| vectors.iter().all(|a| accept(dot(h, a))))
}

fn clear_denominators(h: &[BigRational]) -> Vec<i64> {
    let lcm = h
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let lcm = lcm.abs();
    h.iter()
        .map(|x| {
            (x.numer() * (&lcm / x.denom()))
                .to_i64()
                .expect("form fits in i64")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_input() {
        assert!(matches!(
            ASet::new(2, vec![vec![1, 0], vec![1]]),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
        assert!(ASet::new(1, vec![]).is_err());
    }

    #[test]
    fn pointedness_witnesses() {
        let kl = ASet::from_rows(vec![vec![1], vec![-1]]).unwrap();
        assert!(kl.pointedness().is_none());
        let ex1 = ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap();
        let h = ex1.pointedness().unwrap();
        assert!(ex1.vectors().iter().all(|a| dot(h, a) >= 1));
        let skew = ASet::from_rows(vec![vec![1, 0], vec![1, 2], vec![2, -1]]).unwrap();
        let h = skew.pointedness().unwrap();
        assert!(skew.vectors().iter().all(|a| dot(h, a) >= 1));
    }

    #[test]
    fn combine_matches_definition() {
        let a = ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap();
        assert_eq!(a.combine(&[1, 1, 1, 1]).0, vec![2, 2, 0]);
        assert_eq!(a.combine_signed(&[-1, -1, 1, 1]).0, vec![0, 0, 0]);
    }
}
