use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::ASet;
use crate::linalg::{integer_left_kernel, is_integral, rat, rational_coordinates, solve_rational};

/// The lattice `L` of integer relations `sum l_i a_i = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationLattice {
    pub basis: Vec<Vec<i64>>,
    pub rank_a: usize,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Largest 1-norm among the basis vectors.
    pub fn max_basis_norm(&self) -> u64 {
        self.basis
            .iter()
            .map(|b| b.iter().map(|x| x.unsigned_abs()).sum())
            .max()
            .unwrap_or(0)
    }

    /// Whether `l` is an integer combination of the basis.
    pub fn contains(&self, l: &[i64]) -> bool {
        if l.iter().all(|&x| x == 0) {
            return true;
        }
        let Some(coords) = rational_coordinates(&self.basis, l) else {
            return false;
        };
        if !coords.iter().all(is_integral) {
            return false;
        }
        let Some(c): Option<Vec<i64>> = coords.iter().map(|x| x.to_integer().to_i64()).collect()
        else {
            return false;
        };
        (0..l.len()).all(|j| {
            self.basis
                .iter()
                .zip(&c)
                .map(|(b, x)| x * b[j])
                .sum::<i64>()
                == l[j]
        })
    }

    /// Nonzero combinations `sum c_k b_k` with `|c_k| <= max_coeff` and 1-norm at
    /// most `norm_cap`, sorted and without duplicates.
    pub fn combinations(&self, max_coeff: i64, norm_cap: u64) -> Vec<Vec<i64>> {
        let r = self.basis.len();
        if r == 0 {
            return Vec::new();
        }
        let big_n = self.basis[0].len();
        let side = (2 * max_coeff + 1) as usize;
        let mut out = std::collections::BTreeSet::new();
        for mut idx in 0..side.pow(r as u32) {
            let mut v = vec![0i64; big_n];
            for b in &self.basis {
                let c = (idx % side) as i64 - max_coeff;
                idx /= side;
                for (x, y) in v.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            let norm: u64 = v.iter().map(|x| x.unsigned_abs()).sum();
            if norm > 0 && norm <= norm_cap {
                out.insert(v);
            }
        }
        out.into_iter().collect()
    }
}

/// Integer basis of `L = ker(A) in Z^N` by exact unimodular elimination.
pub fn relation_kernel_basis(a: &ASet) -> RelationLattice {
    let basis = integer_left_kernel(a.vectors(), a.dim());
    RelationLattice {
        rank_a: a.len() - basis.len(),
        basis,
    }
}

/// A rational form `h` with `h(a_i) = 1` for all `i`, if one exists.
pub fn nonconfluence_form(a: &ASet) -> Option<Vec<BigRational>> {
    a.nonconfluent_form().map(<[BigRational]>::to_vec)
}

pub(crate) fn nonconfluence_form_of(vectors: &[Vec<i64>], dim: usize) -> Option<Vec<BigRational>> {
    let rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| rat(x)).collect())
        .collect();
    let rhs = vec![BigRational::one(); vectors.len()];
    solve_rational(&rows, &rhs, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let kl = ASet::from_rows(vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(relation_kernel_basis(&kl).basis, vec![vec![1, 1]]);
        let ex1 = ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap();
        let l = relation_kernel_basis(&ex1);
        assert_eq!(l.basis, vec![vec![-1, -1, 1, 1]]);
        assert_eq!(l.rank_a, 3);
        let id = ASet::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(relation_kernel_basis(&id).basis.is_empty());
    }

    #[test]
    fn membership_in_relation_lattice() {
        let ex1 = ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap();
        let l = relation_kernel_basis(&ex1);
        assert!(l.contains(&[2, 2, -2, -2]));
        assert!(!l.contains(&[1, 0, 0, 0]));
        let even = ASet::from_rows(vec![vec![2], vec![4]]).unwrap();
        let l = relation_kernel_basis(&even);
        assert_eq!(l.basis, vec![vec![-2, 1]]);
        assert!(!l.contains(&[-1, 1]));
        assert!(l.contains(&[4, -2]));
    }

    #[test]
    fn nonconfluence_examples() {
        let ex1 = ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap();
        assert_eq!(
            nonconfluence_form(&ex1).unwrap(),
            vec![rat(1), rat(1), rat(1)]
        );
        let kl = ASet::from_rows(vec![vec![1], vec![-1]]).unwrap();
        assert!(nonconfluence_form(&kl).is_none());
        let id = ASet::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(nonconfluence_form(&id).unwrap(), vec![rat(1), rat(1)]);
    }

    #[test]
    fn bounded_combinations() {
        let kl = ASet::from_rows(vec![vec![1], vec![-1]]).unwrap();
        let l = relation_kernel_basis(&kl);
        assert_eq!(
            l.combinations(3, 4),
            vec![vec![-2, -2], vec![-1, -1], vec![1, 1], vec![2, 2]]
        );
    }
}
