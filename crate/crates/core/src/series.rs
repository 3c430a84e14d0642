//! The characteristic-zero series behind `F_gamma`.
//!
//! Fix `pi` with `pi^(p-1) = -p`. For `u0` in `{0..p-1}^N` put
//! `v0 = u0 / (1 - p)`. When `v0` has minimal negative support, the
//! truncation
//!
//! ```text
//! G_{v0}(lambda) = sum over l with u0 + l in U^+_{p-1}(gamma) of
//!     [v0]_{l-} / [v0 + l]_{l+} * pi^{|u0 + l|} lambda^{u0 + l}
//! ```
//!
//! satisfies: `pi^{-w(gamma)} G_{v0}` has p-integral coefficients and is
//! congruent mod `pi` to `u0_1! ... u0_N! F_gamma`. Everything here is exact
//! rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gfpoly::GfPoly;
use crate::lattice::{classify_goodness, enumerate_box, relation_kernel_basis, ASet};
use crate::modp::{self, FactorialTable};
use crate::solutions::factorial_sum;
use crate::vector::{ExponentVector, LatticeVector};

/// `value * pi^pi_exp` with `0 <= pi_exp <= p - 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiRational {
    value: BigRational,
    pi_exp: u64,
    p: u64,
}

impl PiRational {
    /// Normalizes `value * pi^exp` using `pi^(p-1) = -p`.
    pub fn new(value: BigRational, exp: i64, p: u64) -> Self {
        if value.is_zero() {
            return PiRational {
                value,
                pi_exp: 0,
                p,
            };
        }
        let (fold, r) = exp.div_mod_floor(&(p as i64 - 1));
        let minus_p = BigRational::from_integer(BigInt::from(-(p as i64)));
        let factor = if fold >= 0 {
            num_traits::pow(minus_p, fold as usize)
        } else {
            num_traits::pow(minus_p.recip(), (-fold) as usize)
        };
        PiRational {
            value: value * factor,
            pi_exp: r as u64,
            p,
        }
    }

    pub fn from_integer(x: i64, p: u64) -> Self {
        PiRational::new(BigRational::from_integer(x.into()), 0, p)
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn pi_exp(&self) -> u64 {
        self.pi_exp
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn mul(&self, other: &PiRational) -> Result<PiRational> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        Ok(PiRational::new(
            &self.value * &other.value,
            (self.pi_exp + other.pi_exp) as i64,
            self.p,
        ))
    }

    /// Sum of two values with the same power of `pi`; other sums do not stay
    /// in this form.
    pub fn add(&self, other: &PiRational) -> Result<PiRational> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p, other.p));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi_exp != other.pi_exp {
            return Err(Error::InvalidInput(
                "cannot add values with different powers of pi".into(),
            ));
        }
        Ok(PiRational::new(
            &self.value + &other.value,
            self.pi_exp as i64,
            self.p,
        ))
    }

    /// Multiplies by `pi^k`.
    pub fn shift(&self, k: i64) -> PiRational {
        PiRational::new(self.value.clone(), self.pi_exp as i64 + k, self.p)
    }

    /// `ord_p` of the rational part; `None` for zero.
    pub fn ord_p(&self) -> Option<i64> {
        (!self.is_zero())
            .then(|| ord_p(self.value.numer(), self.p) - ord_p(self.value.denom(), self.p))
    }

    pub fn is_p_integral(&self) -> bool {
        self.ord_p().is_none_or(|v| v >= 0)
    }

    /// Image in `F_p = Z_p[pi]/(pi)`; `None` when not p-integral.
    pub fn reduce_mod_pi(&self) -> Option<u64> {
        if !self.is_p_integral() {
            return None;
        }
        if self.is_zero() || self.pi_exp > 0 {
            return Some(0);
        }
        Some(rational_mod_p(&self.value, self.p))
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_exp {
            0 => write!(f, "{}", self.value),
            1 => write!(f, "{}*pi", self.value),
            k => write!(f, "{}*pi^{k}", self.value),
        }
    }
}

impl Serialize for PiRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PiRational", 2)?;
        s.serialize_field(
            "value",
            &format!("{}/{}", self.value.numer(), self.value.denom()),
        )?;
        s.serialize_field("pi_exp", &self.pi_exp)?;
        s.end()
    }
}

fn ord_p(x: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut k = 0;
    while !x.is_zero() && (&x % &p).is_zero() {
        x /= &p;
        k += 1;
    }
    k
}

/// Residue of a p-integral rational.
fn rational_mod_p(x: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_u64().expect("residue fits");
    let d = x.denom().mod_floor(&pb).to_u64().expect("residue fits");
    modp::mul(n, modp::inv(d, p), p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "witness", rename_all = "kebab-case")]
pub enum Minimality {
    Verified,
    RefutedBy(Vec<i64>),
    UnknownUpToCap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportProfile {
    #[serde(serialize_with = "ser_rationals")]
    pub v0: Vec<BigRational>,
    /// Indices (from 0) where `v0` is a negative integer.
    pub nsupp: Vec<usize>,
    pub minimality: Minimality,
}

fn ser_rationals<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| format!("{}/{}", x.numer(), x.denom())))
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Indices where `v0 + l` is a negative integer.
fn negative_support(v0: &[BigRational], l: &[i64]) -> Vec<usize> {
    v0.iter()
        .zip(l)
        .enumerate()
        .filter(|(_, (v, &x))| {
            let s = *v + rat(x);
            s.is_integer() && s.is_negative()
        })
        .map(|(i, _)| i)
        .collect()
}

/// `v0 = u0/(1-p)`, its negative support, and whether some relation shrinks it.
///
/// The test runs over combinations of the kernel basis of 1-norm at most
/// `norm_cap` (default three times the largest basis norm). When the relation
/// lattice has rank at most one the answer is exact: only the signs of
/// `c * b` matter, so `c = 1` and `c = -1` cover every multiple.
pub fn support_profile(
    a: &ASet,
    u0: &ExponentVector,
    p: u64,
    norm_cap: Option<u64>,
) -> Result<SupportProfile> {
    a.check_exponents(u0)?;
    if u0.max_entry() >= p {
        return Err(Error::InvalidInput(format!(
            "u0 = {u0} has entries above p - 1"
        )));
    }
    let denom = rat(1 - p as i64);
    let v0: Vec<BigRational> = u0.0.iter().map(|&x| rat(x as i64) / &denom).collect();
    let nsupp = negative_support(&v0, &vec![0; v0.len()]);
    let lattice = relation_kernel_basis(a);
    let minimality = if nsupp.is_empty() {
        Minimality::Verified
    } else {
        let cap = norm_cap.unwrap_or(3 * lattice.max_basis_norm());
        let shrinks = |l: &[i64]| {
            let s = negative_support(&v0, l);
            s.len() < nsupp.len() && s.iter().all(|i| nsupp.contains(i))
        };
        let candidates = if lattice.rank() <= 1 {
            lattice.combinations(1, u64::MAX)
        } else {
            lattice.combinations(3, cap)
        };
        match candidates.into_iter().find(|l| shrinks(l)) {
            Some(l) => Minimality::RefutedBy(l),
            None if lattice.rank() <= 1 => Minimality::Verified,
            None => Minimality::UnknownUpToCap,
        }
    };
    Ok(SupportProfile {
        v0,
        nsupp,
        minimality,
    })
}

/// `[v0]_{l-} / [v0 + l]_{l+}`.
pub fn series_coefficient(v0: &[BigRational], l: &[i64]) -> Result<BigRational> {
    if v0.len() != l.len() {
        return Err(Error::DimensionMismatch {
            expected: v0.len(),
            found: l.len(),
        });
    }
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    for (v, &li) in v0.iter().zip(l) {
        if li < 0 {
            for j in 1..=-li {
                num *= v - rat(j - 1);
            }
        } else {
            for j in 1..=li {
                den *= v + rat(j);
            }
        }
    }
    if den.is_zero() {
        return Err(Error::InvalidInput(format!(
            "denominator vanishes for l = {l:?}"
        )));
    }
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesTerm {
    pub exps: ExponentVector,
    pub coefficient: PiRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedSeries {
    pub gamma: LatticeVector,
    pub profile: SupportProfile,
    pub terms: Vec<SeriesTerm>,
}

/// The truncation `G_{v0}` over `U^+_{p-1}(gamma)`, `gamma = sum u0_i a_i`.
pub fn truncated_g(
    a: &ASet,
    u0: &ExponentVector,
    p: u64,
    norm_cap: Option<u64>,
) -> Result<TruncatedSeries> {
    let profile = support_profile(a, u0, p, norm_cap)?;
    let gamma = a.combine(&u0.0);
    let mut terms = Vec::new();
    for w in enumerate_box(a, &gamma, p - 1)? {
        let l: Vec<i64> =
            w.0.iter()
                .zip(&u0.0)
                .map(|(&x, &y)| x as i64 - y as i64)
                .collect();
        let c = series_coefficient(&profile.v0, &l)?;
        terms.push(SeriesTerm {
            coefficient: PiRational::new(c, w.total() as i64, p),
            exps: w,
        });
    }
    Ok(TruncatedSeries {
        gamma,
        profile,
        terms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub gamma: LatticeVector,
    pub weight: u64,
    pub minimality: Minimality,
    pub terms_checked: usize,
    pub p_integral: bool,
    pub congruence: bool,
    pub reduced: GfPoly,
    pub expected: GfPoly,
    pub failures: Vec<String>,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.p_integral && self.congruence
    }
}

/// Checks p-integrality of `pi^{-w(gamma)} G_{v0}` and its congruence with
/// `(prod u0_i!) F_gamma` mod `pi`.
pub fn verify_series_reduction(
    a: &ASet,
    u0: &ExponentVector,
    p: u64,
    cap: u64,
    norm_cap: Option<u64>,
) -> Result<ReductionReport> {
    let gamma = a.combine(&u0.0);
    let g = classify_goodness(a, &gamma, p, cap)?;
    if !g.good {
        return Err(Error::NotGood(gamma.0));
    }
    if !g.report.minimals.contains(u0) {
        return Err(Error::Hypothesis(format!(
            "{u0} is not a minimal representation of {gamma}"
        )));
    }
    let weight = g.report.weight.expect("found");
    let series = truncated_g(a, u0, p, norm_cap)?;
    if let Minimality::RefutedBy(l) = &series.profile.minimality {
        return Err(Error::Hypothesis(format!(
            "negative support of v0 is not minimal (shrunk by {l:?})"
        )));
    }
    let mut failures = Vec::new();
    let mut reduced = GfPoly::zero(p, a.len());
    for t in &series.terms {
        let shifted = t.coefficient.shift(-(weight as i64));
        match shifted.reduce_mod_pi() {
            Some(r) => reduced.add_term(t.exps.clone(), r),
            None => failures.push(format!(
                "coefficient {shifted} of {} is not p-integral",
                t.exps
            )),
        }
    }
    let p_integral = failures.is_empty();
    let table = FactorialTable::new(p);
    let scale = u0.0.iter().fold(1, |acc, &x| acc * table.fact(x) % p);
    let expected = factorial_sum(p, a.len(), &g.report.minimals, &table).scale(scale as i64);
    let congruence = p_integral && reduced == expected;
    if p_integral && !congruence {
        failures.push(format!("reduction {reduced} differs from {expected}"));
    }
    Ok(ReductionReport {
        gamma,
        weight,
        minimality: series.profile.minimality,
        terms_checked: series.terms.len(),
        p_integral,
        congruence,
        reduced,
        expected,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> ASet {
        ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ev(v: &[u64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn normalization() {
        let x = PiRational::new(q(1, 1), 2, 3);
        assert_eq!((x.value().clone(), x.pi_exp()), (q(-3, 1), 0));
        let y = PiRational::new(q(1, 1), -1, 3);
        assert_eq!((y.value().clone(), y.pi_exp()), (q(-1, 3), 1));
        assert_eq!(
            PiRational::new(q(0, 1), 7, 5),
            PiRational::new(q(0, 1), 0, 5)
        );
        assert_eq!(PiRational::new(q(2, 1), 9, 5).pi_exp(), 1);
        assert!(!y.is_p_integral());
        assert_eq!(PiRational::new(q(1, 4), 0, 3).reduce_mod_pi(), Some(1));
    }

    #[test]
    fn support_profiles() {
        let pr = support_profile(&example1(), &ev(&[1, 1, 0, 0]), 3, None).unwrap();
        assert_eq!(pr.v0, vec![q(-1, 2), q(-1, 2), q(0, 1), q(0, 1)]);
        assert!(pr.nsupp.is_empty());
        assert_eq!(pr.minimality, Minimality::Verified);
        let k = ASet::from_rows(vec![vec![1], vec![-1]]).unwrap();
        let pr = support_profile(&k, &ev(&[2, 0]), 3, None).unwrap();
        assert_eq!(pr.nsupp, vec![0]);
        assert_eq!(pr.minimality, Minimality::RefutedBy(vec![1, 1]));
    }

    #[test]
    fn coefficients() {
        let v0 = vec![q(-1, 2), q(-1, 2), q(0, 1), q(0, 1)];
        assert_eq!(series_coefficient(&v0, &[-1, -1, 1, 1]).unwrap(), q(1, 4));
        assert_eq!(series_coefficient(&v0, &[0, 0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(series_coefficient(&v0, &[-2, -2, 2, 2]).unwrap(), q(9, 64));
    }

    #[test]
    fn truncation_example1() {
        let s = truncated_g(&example1(), &ev(&[1, 1, 0, 0]), 3, None).unwrap();
        let got: Vec<(ExponentVector, PiRational)> = s
            .terms
            .iter()
            .map(|t| (t.exps.clone(), t.coefficient.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (ev(&[0, 0, 1, 1]), PiRational::new(q(1, 4), 2, 3)),
                (ev(&[1, 1, 0, 0]), PiRational::new(q(1, 1), 2, 3)),
            ]
        );
        let s = truncated_g(&example1(), &ev(&[0, 0, 0, 0]), 5, None).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.terms[0].coefficient, PiRational::from_integer(1, 5));
    }

    #[test]
    fn reduction_on_first_example() {
        for (p, u0) in [
            (3, [1, 1, 0, 0]),
            (5, [2, 2, 0, 0]),
            (7, [3, 3, 0, 0]),
            (5, [0, 0, 0, 0]),
        ] {
            let r = verify_series_reduction(&example1(), &ev(&u0), p, 100, None).unwrap();
            assert!(r.passed(), "{:?}", r.failures);
        }
    }
}
