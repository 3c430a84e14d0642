//! Sparse multivariate polynomials over F_p.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector, so iteration is
//! lexicographic in the exponents and no zero coefficient is ever stored.
//! The canonical text form lists terms in that order, e.g.
//! `4*l1^3 + 2*l1^5*l2^2`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modp;
use crate::vector::ExponentVector;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GfPoly {
    p: u64,
    nvars: usize,
    terms: BTreeMap<ExponentVector, u64>,
}

/// One term of the JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coef: u64,
    pub exps: Vec<u64>,
}

impl GfPoly {
    pub fn zero(p: u64, nvars: usize) -> Self {
        GfPoly {
            p,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(p: u64, nvars: usize, c: i64) -> Self {
        let mut f = GfPoly::zero(p, nvars);
        f.add_term(ExponentVector::zero(nvars), modp::reduce(c, p));
        f
    }

    pub fn one(p: u64, nvars: usize) -> Self {
        GfPoly::constant(p, nvars, 1)
    }

    /// `c * lambda^exps`.
    pub fn monomial(p: u64, exps: Vec<u64>, c: i64) -> Self {
        let mut f = GfPoly::zero(p, exps.len());
        f.add_term(ExponentVector(exps), modp::reduce(c, p));
        f
    }

    /// The variable `lambda_{i+1}` (0-based index `i`).
    pub fn var(p: u64, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        GfPoly::monomial(p, e, 1)
    }

    /// Sums the given terms; coefficients are reduced and repeated exponents merged.
    pub fn from_terms<I>(p: u64, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u64>, i64)>,
    {
        let mut f = GfPoly::zero(p, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            f.add_term(ExponentVector(e), modp::reduce(c, p));
        }
        Ok(f)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn support(&self) -> impl Iterator<Item = &ExponentVector> {
        self.terms.keys()
    }

    pub fn coeff(&self, exps: &[u64]) -> u64 {
        self.terms
            .get(&ExponentVector(exps.to_vec()))
            .copied()
            .unwrap_or(0)
    }

    /// Highest exponent of variable `i` (0 for the zero polynomial).
    pub fn degree_in(&self, i: usize) -> u64 {
        self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0)
    }

    /// Adds `c * lambda^e` in place.
    pub fn add_term(&mut self, e: ExponentVector, c: u64) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = (*o.get() + c) % self.p;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &GfPoly) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &GfPoly) -> Result<GfPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &GfPoly) -> Result<GfPoly> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> GfPoly {
        self.scale(self.p as i64 - 1)
    }

    pub fn scale(&self, c: i64) -> GfPoly {
        let c = modp::reduce(c, self.p);
        let mut out = GfPoly::zero(self.p, self.nvars);
        if c == 0 {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(e, &x)| (e.clone(), x * c % self.p))
            .collect();
        out
    }

    pub fn checked_mul(&self, other: &GfPoly) -> Result<GfPoly> {
        self.check_compatible(other)?;
        let mut acc: BTreeMap<ExponentVector, u64> = BTreeMap::new();
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e: Option<Vec<u64>> =
                    e1.0.iter()
                        .zip(&e2.0)
                        .map(|(x, y)| x.checked_add(*y))
                        .collect();
                let e = ExponentVector(e.ok_or(Error::Overflow)?);
                let slot = acc.entry(e).or_insert(0);
                *slot = (*slot + c1 * c2) % self.p;
            }
        }
        acc.retain(|_, c| *c != 0);
        Ok(GfPoly {
            p: self.p,
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn pow(&self, k: u64) -> Result<GfPoly> {
        let mut acc = GfPoly::one(self.p, self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `(d/d lambda_i)^k f` in characteristic p: the term `lambda^u` becomes
    /// `u_i (u_i - 1) ... (u_i - k + 1) lambda^(u - k e_i)`.
    pub fn derivative_power(&self, i: usize, k: u64) -> GfPoly {
        if k == 0 {
            return self.clone();
        }
        let mut out = GfPoly::zero(self.p, self.nvars);
        for (e, &c) in &self.terms {
            let ui = e.0[i];
            if ui < k {
                continue;
            }
            let f = modp::falling(ui, k, self.p);
            if f == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[i] -= k;
            out.add_term(e2, c * f % self.p);
        }
        out
    }

    /// Substitutes `lambda_i -> lambda_i^(p^k)` for every variable.
    pub fn frobenius_twist(&self, k: u32) -> Result<GfPoly> {
        let scale = self.p.checked_pow(k).ok_or(Error::Overflow)?;
        let mut out = GfPoly::zero(self.p, self.nvars);
        for (e, &c) in &self.terms {
            let e2: Option<Vec<u64>> = e.0.iter().map(|x| x.checked_mul(scale)).collect();
            out.terms
                .insert(ExponentVector(e2.ok_or(Error::Overflow)?), c);
        }
        Ok(out)
    }

    /// Value at a point of F_p^N.
    pub fn evaluate(&self, point: &[u64]) -> Result<u64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let p = self.p;
        Ok(self.terms.iter().fold(0, |acc, (e, &c)| {
            let m =
                e.0.iter()
                    .zip(point)
                    .fold(c, |m, (&k, &x)| m * modp::pow(x, k, p) % p);
            (acc + m) % p
        }))
    }

    /// JSON form: `[{coef, exps}, ...]` in canonical order.
    pub fn to_terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(e, &c)| Term {
                coef: c,
                exps: e.0.clone(),
            })
            .collect()
    }

    pub fn from_json_terms(p: u64, nvars: usize, terms: &[Term]) -> Result<GfPoly> {
        GfPoly::from_terms(
            p,
            nvars,
            terms.iter().map(|t| (t.exps.clone(), (t.coef % p) as i64)),
        )
    }
}

impl Serialize for GfPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for t in self.to_terms() {
            seq.serialize_element(&t)?;
        }
        seq.end()
    }
}

impl fmt::Display for GfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, &c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> =
                e.0.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .map(|(i, &x)| {
                        if x == 1 {
                            format!("l{}", i + 1)
                        } else {
                            format!("l{}^{}", i + 1, x)
                        }
                    })
                    .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => f.write_str(&vars.join("*"))?,
                (_, false) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, nvars: usize, terms: &[(&[u64], i64)]) -> GfPoly {
        GfPoly::from_terms(p, nvars, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let p = 5;
        let l1 = GfPoly::var(p, 2, 0);
        let l2 = GfPoly::var(p, 2, 1);
        let s = l1
            .checked_add(&l2)
            .unwrap()
            .checked_add(&l2.scale(4))
            .unwrap();
        assert_eq!(s, l1);
        let sum2 = GfPoly::var(2, 2, 0)
            .checked_add(&GfPoly::var(2, 2, 1))
            .unwrap();
        assert_eq!(sum2.pow(2).unwrap().to_string(), "l2^2 + l1^2");
        assert!(l1.scale(0).is_zero());
        assert!(l1.checked_sub(&l1).unwrap().is_zero());
    }

    #[test]
    fn mismatches_are_errors() {
        assert!(matches!(
            GfPoly::one(3, 2).checked_add(&GfPoly::one(5, 2)),
            Err(Error::ModulusMismatch(3, 5))
        ));
        assert!(GfPoly::one(3, 2).checked_mul(&GfPoly::one(3, 3)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let f = poly(5, 1, &[(&[3], 1)]);
        assert_eq!(f.derivative_power(0, 2), poly(5, 1, &[(&[1], 1)]));
        let g = poly(5, 1, &[(&[5], 1)]);
        assert!(g.derivative_power(0, 1).is_zero());
        let h = poly(3, 4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]);
        assert_eq!(h.derivative_power(2, 1), poly(3, 4, &[(&[0, 0, 0, 1], 1)]));
        assert_eq!(f.derivative_power(0, 0), f);
    }

    #[test]
    fn frobenius_examples() {
        let f = poly(3, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(
            f.frobenius_twist(1).unwrap(),
            poly(3, 2, &[(&[3, 0], 1), (&[0, 3], 1)])
        );
        assert_eq!(
            GfPoly::one(7, 3).frobenius_twist(4).unwrap(),
            GfPoly::one(7, 3)
        );
        let g = poly(5, 2, &[(&[1, 1], 2)]);
        assert_eq!(g.frobenius_twist(2).unwrap(), poly(5, 2, &[(&[25, 25], 2)]));
    }

    #[test]
    fn evaluation_examples() {
        let h = poly(5, 1, &[(&[0], 1), (&[1], 4), (&[2], 1)]);
        assert_eq!(h.evaluate(&[2]).unwrap(), 3);
        let g = poly(7, 2, &[(&[0, 0], 6), (&[2, 1], 3)]);
        assert_eq!(g.evaluate(&[0, 0]).unwrap(), 6);
        assert_eq!(GfPoly::zero(7, 2).evaluate(&[3, 4]).unwrap(), 0);
        assert!(g.evaluate(&[1]).is_err());
    }

    #[test]
    fn canonical_text_and_json() {
        let f = poly(5, 2, &[(&[5, 2], 2), (&[3, 0], 4)]);
        assert_eq!(f.to_string(), "4*l1^3 + 2*l1^5*l2^2");
        assert_eq!(GfPoly::zero(5, 2).to_string(), "0");
        assert_eq!(GfPoly::constant(5, 2, -1).to_string(), "4");
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"[{"coef":4,"exps":[3,0]},{"coef":2,"exps":[5,2]}]"#);
        let terms: Vec<Term> = serde_json::from_str(&json).unwrap();
        assert_eq!(GfPoly::from_json_terms(5, 2, &terms).unwrap(), f);
    }
}
