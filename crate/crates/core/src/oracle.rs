//! Brute-force checks over `F_p` that do not share code paths with the
//! symbolic pipeline beyond polynomial evaluation.
//!
//! * Point counts of homogeneous hypersurfaces `f_lambda = 0` compared with
//!   the affine Hasse invariant of `x_{n+1} f_lambda`.
//! * The coefficient of `x^{gamma_0}` in `(x_{n+1} f_lambda)^{p-1}`, expanded
//!   by repeated multiplication, compared with `(p-1)! F_{gamma_0}`.
//! * Legendre curves `y^2 = x(x-1)(x-lambda)`: the Hasse polynomial against
//!   `a_p = p - #E_aff(F_p)`.
//! * `U_M`, `w_p(M)` and `U_{M,min}` re-derived by scanning the whole box.
//!
//! Every oracle refuses work above its evaluation budget instead of sampling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::GfPoly;
use crate::hasse::hasse_affine;
use crate::lattice::ASet;
use crate::modp::{self, FactorialTable};
use crate::problem::ProblemSpec;
use crate::pweight::{enumerate_u_m, enumerate_u_m_naive, wp_min, MSpec};
use crate::solutions::build_f;
use crate::vector::{ExponentVector, LatticeVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub instance: String,
    pub checked: u64,
    pub passed: bool,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl OracleReport {
    fn new(instance: String, checked: u64, failures: Vec<String>) -> Self {
        OracleReport {
            instance,
            checked,
            passed: failures.is_empty(),
            failures,
            skipped: None,
        }
    }

    fn skip(instance: String, reason: String) -> Self {
        OracleReport {
            instance,
            checked: 0,
            passed: true,
            failures: Vec::new(),
            skipped: Some(reason),
        }
    }
}

/// `f_lambda = sum_j lambda_j x^{a_j}` with every `a_j` of the same degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypersurfaceFamily {
    pub p: u64,
    pub n: usize,
    pub monomials: Vec<Vec<u64>>,
}

impl HypersurfaceFamily {
    pub fn new(p: u64, monomials: Vec<Vec<u64>>) -> Result<Self> {
        modp::check_prime(p)?;
        let n = monomials
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("no monomials".into()))?;
        if let Some(m) = monomials.iter().find(|m| m.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.len(),
            });
        }
        let d: u64 = monomials[0].iter().sum();
        if d == 0 || monomials.iter().any(|m| m.iter().sum::<u64>() != d) {
            return Err(Error::InvalidInput(
                "monomials must share a positive degree".into(),
            ));
        }
        Ok(HypersurfaceFamily { p, n, monomials })
    }

    /// The diagonal family `sum_i lambda_i x_i^d`.
    pub fn diagonal(p: u64, n: usize, d: u64) -> Result<Self> {
        let monomials = (0..n)
            .map(|i| (0..n).map(|j| if i == j { d } else { 0 }).collect())
            .collect();
        HypersurfaceFamily::new(p, monomials)
    }

    pub fn degree(&self) -> u64 {
        self.monomials[0].iter().sum()
    }

    pub fn big_n(&self) -> usize {
        self.monomials.len()
    }

    pub fn label(&self) -> String {
        let terms: Vec<String> = self
            .monomials
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{k}", i + 1)
                        }
                    })
                    .collect();
                format!("l{}*{}", j + 1, vars.join("*"))
            })
            .collect();
        format!("p={} f={}", self.p, terms.join(" + "))
    }

    /// `A' = {(a_j, 1)}`, the exponents of `x_{n+1} f_lambda`, as an affine
    /// problem with every variable affine and `e = 0`.
    pub fn augmented(&self) -> Result<ProblemSpec> {
        let rows = self
            .monomials
            .iter()
            .map(|m| m.iter().map(|&x| x as i64).chain([1]).collect())
            .collect();
        ProblemSpec::affine(self.p, 1, rows, vec![0; self.n + 1], 0)
    }

    /// Whether some `u` with `sum u_i = p - 1` has `sum u_i (a_i, 1)` in
    /// `(p-1) Z_{>0}^{n+1}`.
    pub fn satisfies_hypothesis(&self) -> bool {
        let p = self.p;
        let mut u = vec![0u64; self.big_n()];
        loop {
            if u.iter().sum::<u64>() == p - 1 {
                let ok = (0..self.n).all(|i| {
                    let s: u64 = u.iter().zip(&self.monomials).map(|(&c, m)| c * m[i]).sum();
                    s > 0 && s.is_multiple_of(p - 1)
                });
                if ok {
                    return true;
                }
            }
            let Some(i) = u.iter().rposition(|&x| x + 1 < p) else {
                return false;
            };
            u[i] += 1;
            u[i + 1..].iter_mut().for_each(|x| *x = 0);
        }
    }

    fn evaluator(&self, lambda: &[u64]) -> impl Fn(&[u64]) -> u64 + '_ {
        let p = self.p;
        let d = self.degree();
        let powers: Vec<Vec<u64>> = (0..p)
            .map(|x| (0..=d).map(|k| modp::pow(x, k, p)).collect())
            .collect();
        let lambda = lambda.to_vec();
        move |x: &[u64]| {
            self.monomials.iter().zip(&lambda).fold(0, |acc, (m, &c)| {
                let term = m
                    .iter()
                    .zip(x)
                    .fold(c, |t, (&k, &xi)| t * powers[xi as usize][k as usize] % p);
                (acc + term) % p
            })
        }
    }
}

fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Calls `visit` on every point of `{0..p-1}^n` in lexicographic order.
fn for_each_point(p: u64, n: usize, mut visit: impl FnMut(&[u64])) {
    let mut x = vec![0u64; n];
    loop {
        visit(&x);
        let Some(i) = x.iter().rposition(|&v| v + 1 < p) else {
            return;
        };
        x[i] += 1;
        x[i + 1..].iter_mut().for_each(|v| *v = 0);
    }
}

fn point(index: u64, p: u64, n: usize) -> Vec<u64> {
    let mut x = vec![0; n];
    let mut r = index;
    for v in x.iter_mut().rev() {
        *v = r % p;
        r /= p;
    }
    x
}

/// `N_aff(lambda) = #{x in F_p^n : f_lambda(x) = 0}`.
pub fn count_affine_zeros(family: &HypersurfaceFamily, lambda: &[u64], budget: u64) -> Result<u64> {
    if lambda.len() != family.big_n() {
        return Err(Error::DimensionMismatch {
            expected: family.big_n(),
            found: lambda.len(),
        });
    }
    check_budget((family.p as u128).pow(family.n as u32), budget)?;
    let f = family.evaluator(lambda);
    let mut count = 0;
    for_each_point(family.p, family.n, |x| count += u64::from(f(x) == 0));
    Ok(count)
}

/// Compares `N_aff(lambda) mod p` with the affine Hasse invariant of
/// `x_{n+1} f_lambda` at every `lambda in F_p^N`.
///
/// The invariant from the layer formula carries the sign `(-1)^(n+1)` while
/// the point count is congruent to `(-1)^n sum F_{gamma_0}`, so the check is
/// `N_aff(lambda) = -H(lambda) mod p`.
pub fn example3_check(family: &HypersurfaceFamily, budget: u64) -> Result<OracleReport> {
    let p = family.p;
    let label = family.label();
    if !family.satisfies_hypothesis() {
        return Ok(OracleReport::skip(
            label,
            "no u with sum p-1 maps into (p-1)Z_{>0}^{n+1}".into(),
        ));
    }
    let n_lambda = (p as u128).pow(family.big_n() as u32);
    check_budget(n_lambda * (p as u128).pow(family.n as u32), budget)?;
    let h = hasse_affine(&family.augmented()?)?.h;
    let failures: Vec<String> = (0..n_lambda as u64)
        .into_par_iter()
        .map(|i| -> Result<Option<String>> {
            let lambda = point(i, p, family.big_n());
            let count = count_affine_zeros(family, &lambda, budget)?;
            let predicted = (p - h.evaluate(&lambda)?) % p;
            Ok((count % p != predicted)
                .then(|| format!("lambda={lambda:?}: N_aff={count}, -H={predicted}")))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(OracleReport::new(label, n_lambda as u64, failures))
}

/// `gamma_0` for the sequences of the top layer `M_{n+1}`.
pub fn top_layer_points(family: &HypersurfaceFamily) -> Result<Vec<LatticeVector>> {
    let res = hasse_affine(&family.augmented()?)?;
    let top = family.n + 1;
    Ok(res
        .layers
        .iter()
        .filter(|l| l.l == top)
        .flat_map(|l| l.gamma_sequences.iter().map(|s| s.gammas[0].clone()))
        .collect())
}

/// Coefficient of `x^{gamma_0}` in `(x_{n+1} f_lambda)^{p-1}` as a
/// polynomial in `lambda`, by expanding the power in `N + n + 1` variables.
pub fn katz_coefficient(family: &HypersurfaceFamily, gamma0: &LatticeVector) -> Result<GfPoly> {
    let (p, big_n, n) = (family.p, family.big_n(), family.n);
    if gamma0.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: gamma0.len(),
        });
    }
    let nvars = big_n + n + 1;
    let mut g = GfPoly::zero(p, nvars);
    for (j, m) in family.monomials.iter().enumerate() {
        let mut e = vec![0u64; nvars];
        e[j] = 1;
        e[big_n..big_n + n].copy_from_slice(m);
        e[big_n + n] = 1;
        g.add_term(ExponentVector(e), 1);
    }
    let expanded = g.pow(p - 1)?;
    let mut out = GfPoly::zero(p, big_n);
    for (e, c) in expanded.terms() {
        let x_part = &e.0[big_n..];
        if x_part.iter().zip(&gamma0.0).all(|(&x, &y)| x as i64 == y) {
            out.add_term(ExponentVector(e.0[..big_n].to_vec()), c);
        }
    }
    Ok(out)
}

/// `(p-1)! F_{gamma_0}`, taken as zero when `gamma_0` is not in `NA'`.
fn scaled_f(family: &HypersurfaceFamily, gamma0: &LatticeVector) -> Result<GfPoly> {
    let spec = family.augmented()?;
    let a = spec.a_set()?;
    let p = family.p;
    match build_f(&a, gamma0, p, spec.caps.weight_cap) {
        Ok(f) => Ok(f.scale(FactorialTable::new(p).fact(p - 1) as i64)),
        Err(Error::NotInSemigroup(_)) => Ok(GfPoly::zero(p, family.big_n())),
        Err(e) => Err(e),
    }
}

/// Whether `(p-1)! F_{gamma_0}` equals the Katz coefficient.
pub fn katz_identity(family: &HypersurfaceFamily, gamma0: &LatticeVector) -> Result<bool> {
    Ok(katz_coefficient(family, gamma0)? == scaled_f(family, gamma0)?)
}

/// The Katz identity for every `gamma_0` in the top layer.
pub fn katz_coefficient_check(family: &HypersurfaceFamily) -> Result<OracleReport> {
    let label = family.label();
    if !family.satisfies_hypothesis() {
        return Ok(OracleReport::skip(
            label,
            "no u with sum p-1 maps into (p-1)Z_{>0}^{n+1}".into(),
        ));
    }
    let points = top_layer_points(family)?;
    let mut failures = Vec::new();
    for g in &points {
        let lhs = katz_coefficient(family, g)?;
        let rhs = scaled_f(family, g)?;
        if lhs != rhs {
            failures.push(format!("gamma0={g}: coefficient {lhs}, (p-1)! F = {rhs}"));
        }
    }
    Ok(OracleReport::new(label, points.len() as u64, failures))
}

/// `(-1)^m sum_i C(m, i)^2 lambda^i` with `m = (p-1)/2`.
pub fn legendre_hasse(p: u64) -> Result<GfPoly> {
    modp::check_prime(p)?;
    if p == 2 {
        return Err(Error::InvalidInput(
            "the Legendre family needs odd p".into(),
        ));
    }
    let m = (p - 1) / 2;
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    let mut h = GfPoly::zero(p, 1);
    for i in 0..=m {
        let c = modp::binomial(m, i, p);
        h.add_term(
            ExponentVector(vec![i]),
            modp::reduce(sign * (c * c % p) as i64, p),
        );
    }
    Ok(h)
}

/// `#{(x, y) in F_p^2 : y^2 = x(x-1)(x-lambda)}`.
pub fn legendre_affine_count(p: u64, lambda: u64) -> u64 {
    let mut squares = vec![0u64; p as usize];
    for y in 0..p {
        squares[(y * y % p) as usize] += 1;
    }
    (0..p)
        .map(|x| {
            let r = x * ((x + p - 1) % p) % p * ((x + p - lambda % p) % p) % p;
            squares[r as usize]
        })
        .sum()
}

/// Supersingularity and the unit-root congruence for every `lambda != 0, 1`.
pub fn legendre_check(p: u64, budget: u64) -> Result<OracleReport> {
    let h = legendre_hasse(p)?;
    check_budget((p as u128) * (p as u128) * 2, budget)?;
    let failures: Vec<String> = (2..p)
        .into_par_iter()
        .map(|lambda| -> Result<Vec<String>> {
            let n_aff = legendre_affine_count(p, lambda);
            let a_p = modp::reduce(p as i64 - n_aff as i64, p);
            let hv = h.evaluate(&[lambda])?;
            let mut out = Vec::new();
            if (hv == 0) != (a_p == 0) {
                out.push(format!("lambda={lambda}: H={hv} but a_p={a_p} mod p"));
            }
            if a_p != 0 && hv != a_p {
                out.push(format!(
                    "lambda={lambda}: H={hv} differs from a_p={a_p} mod p"
                ));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(OracleReport::new(
        format!("legendre p={p}"),
        p - 2,
        failures,
    ))
}

fn m_specs(spec: &ProblemSpec) -> Vec<MSpec> {
    if spec.is_toric() {
        vec![MSpec::toric(spec.e.clone(), spec.p, spec.a)]
    } else {
        (0..=spec.n - spec.m)
            .map(|l| MSpec::affine_layer(spec.e.clone(), spec.p, spec.a, spec.m, l))
            .collect()
    }
}

/// Re-derives `U_M`, `w_p(M)` and `U_{M,min}` (per layer in the affine case)
/// by scanning `{0..q-1}^N` and diffs them against the residue fold.
pub fn naive_crosscheck(spec: &ProblemSpec) -> Result<OracleReport> {
    spec.validate()?;
    let a: ASet = spec.a_set()?;
    let budget = spec.caps.oracle_budget.min(1_000_000);
    let label = format!("p={} a={} A={:?} e={}", spec.p, spec.a, spec.matrix, spec.e);
    let mut failures = Vec::new();
    let specs = m_specs(spec);
    for ms in &specs {
        let fast = enumerate_u_m(&a, ms)?;
        let slow = enumerate_u_m_naive(&a, ms, budget)?;
        let tag = match ms.kind {
            crate::pweight::MKind::Toric => "M".to_string(),
            crate::pweight::MKind::AffineLayer { layer, .. } => format!("M_{layer}"),
        };
        if fast != slow {
            failures.push(format!(
                "{tag}: fold gives {} points, scan gives {}",
                fast.len(),
                slow.len()
            ));
            continue;
        }
        if !slow.is_empty() {
            let fast_min = wp_min(&fast, spec.p)?;
            let slow_min = naive_wp_min(&slow, spec.p);
            if fast_min != slow_min {
                failures.push(format!("{tag}: minimizers differ"));
            }
        }
    }
    Ok(OracleReport::new(label, specs.len() as u64, failures))
}

/// Digit sums computed through the string expansion in base p.
fn naive_wp_min(us: &[ExponentVector], p: u64) -> (u64, Vec<ExponentVector>) {
    let wp = |u: &ExponentVector| -> u64 {
        u.0.iter()
            .map(|&x| {
                let mut s = 0;
                let mut k = 1u64;
                while k <= x {
                    s += (x / k) % p;
                    k *= p;
                }
                s
            })
            .sum()
    };
    let best = us.iter().map(wp).min().unwrap_or(0);
    let mut mins: Vec<ExponentVector> = us.iter().filter(|u| wp(u) == best).cloned().collect();
    mins.sort();
    (best, mins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_counts() {
        let q2 = HypersurfaceFamily::diagonal(3, 2, 2).unwrap();
        assert_eq!(count_affine_zeros(&q2, &[1, 1], 1000).unwrap(), 1);
        let q5 = HypersurfaceFamily::diagonal(5, 2, 2).unwrap();
        assert_eq!(count_affine_zeros(&q5, &[1, 1], 1000).unwrap(), 9);
        let line = HypersurfaceFamily::new(7, vec![vec![3]]).unwrap();
        assert_eq!(count_affine_zeros(&line, &[1], 1000).unwrap(), 1);
        assert_eq!(count_affine_zeros(&q2, &[1, 0], 1000).unwrap(), 3);
        assert!(count_affine_zeros(&q5, &[1, 1], 10).is_err());
    }

    #[test]
    fn example3_small() {
        let q3 = HypersurfaceFamily::diagonal(3, 2, 2).unwrap();
        let r = example3_check(&q3, 1 << 20).unwrap();
        assert!(r.passed && r.checked == 9, "{:?}", r.failures);
        let q5 = HypersurfaceFamily::diagonal(5, 2, 2).unwrap();
        let r = example3_check(&q5, 1 << 20).unwrap();
        assert!(r.passed && r.checked == 25, "{:?}", r.failures);
        let three = HypersurfaceFamily::diagonal(5, 3, 2).unwrap();
        assert!(example3_check(&three, 1 << 20).unwrap().skipped.is_some());
    }

    #[test]
    fn katz_examples() {
        let q3 = HypersurfaceFamily::diagonal(3, 2, 2).unwrap();
        let c = katz_coefficient(&q3, &LatticeVector(vec![2, 2, 2])).unwrap();
        assert_eq!(c, GfPoly::from_terms(3, 2, [(vec![1, 1], 2)]).unwrap());
        assert!(katz_coefficient_check(&q3).unwrap().passed);
        let lin = HypersurfaceFamily::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(katz_coefficient(&lin, &LatticeVector(vec![1, 1, 1]))
            .unwrap()
            .is_zero());
        assert!(katz_identity(&lin, &LatticeVector(vec![1, 1, 1])).unwrap());
    }

    #[test]
    fn legendre() {
        assert_eq!(legendre_hasse(5).unwrap().to_string(), "1 + 4*l1 + l1^2");
        assert_eq!(legendre_hasse(3).unwrap().evaluate(&[2]).unwrap(), 0);
        for p in [3, 5, 7, 11, 13] {
            let r = legendre_check(p, 1 << 20).unwrap();
            assert!(r.passed, "{:?}", r.failures);
        }
    }

    #[test]
    fn crosscheck_kloosterman() {
        for e in 0..24 {
            let spec = ProblemSpec::toric(5, 2, vec![vec![1], vec![-1]], vec![e]).unwrap();
            assert!(naive_crosscheck(&spec).unwrap().passed);
        }
    }
}
