//! The polynomials `F_gamma` and `G_gamma` and the operators they satisfy mod p.
//!
//! For a good lattice point `gamma`,
//!
//! ```text
//! F_gamma = sum over minimal u of  lambda^u / (u_1! ... u_N!)
//! ```
//!
//! lies in `F_p[lambda]` because every minimal `u` has entries below `p`. It is
//! annihilated mod p by the Euler operators with parameter `beta = gamma mod p`
//! and by the normalized box operators: `prod_{l_i>0} d_i^{l_i}` when
//! `sum l_i > 0`, `prod_{l_i<0} d_i^{-l_i}` when `sum l_i < 0`, and their
//! difference when `sum l_i = 0`. The classical box operator is always the
//! difference.
//!
//! The quantifier "for every relation `l`" is checked on a finite test set:
//! small combinations of the kernel basis plus all differences of
//! representations inside the box `{0..p-1}^N`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::GfPoly;
use crate::lattice::{
    classify_goodness, enumerate_box, relation_kernel_basis, sigma_tau, ASet, Verdict,
};
use crate::modp::{self, FactorialTable};
use crate::problem::Caps;
use crate::vector::{ExponentVector, LatticeVector};

/// Coefficient bound used when forming combinations of kernel basis vectors.
const COMBINATION_COEFF: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxKind {
    Normalized,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    PositiveSum,
    NegativeSum,
    Balanced,
}

/// The box operator attached to a relation `l = l_plus - l_minus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxOperator {
    l: Vec<i64>,
    kind: BoxKind,
}

impl BoxOperator {
    pub fn new(a: &ASet, l: Vec<i64>, kind: BoxKind) -> Result<Self> {
        if l.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: l.len(),
            });
        }
        if !a.combine_signed(&l).is_zero() {
            return Err(Error::InvalidInput(format!("{l:?} is not a relation on A")));
        }
        Ok(BoxOperator { l, kind })
    }

    pub fn relation(&self) -> &[i64] {
        &self.l
    }

    pub fn kind(&self) -> BoxKind {
        self.kind
    }

    pub fn l_plus(&self) -> Vec<u64> {
        self.l.iter().map(|&x| x.max(0) as u64).collect()
    }

    pub fn l_minus(&self) -> Vec<u64> {
        self.l.iter().map(|&x| (-x).max(0) as u64).collect()
    }

    pub fn branch(&self) -> Branch {
        match self.l.iter().sum::<i64>() {
            s if s > 0 => Branch::PositiveSum,
            s if s < 0 => Branch::NegativeSum,
            _ => Branch::Balanced,
        }
    }

    /// Applies the operator; a zero result means `f` is annihilated.
    pub fn apply(&self, f: &GfPoly) -> GfPoly {
        let plus = || differentiate(f, &self.l_plus());
        let minus = || differentiate(f, &self.l_minus());
        let difference = || plus().checked_sub(&minus()).expect("same ring");
        match (self.kind, self.branch()) {
            (BoxKind::Classical, _) | (BoxKind::Normalized, Branch::Balanced) => difference(),
            (BoxKind::Normalized, Branch::PositiveSum) => plus(),
            (BoxKind::Normalized, Branch::NegativeSum) => minus(),
        }
    }
}

/// `prod_i (d/d lambda_i)^{orders_i} f`.
fn differentiate(f: &GfPoly, orders: &[u64]) -> GfPoly {
    orders
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .fold(f.clone(), |g, (i, &k)| g.derivative_power(i, k))
}

/// The Euler operator `sum_j a_{ji} lambda_j d/d lambda_j - beta_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerOperator {
    pub index: usize,
    pub coefficients: Vec<i64>,
    pub beta_residue: u64,
}

pub fn euler_operators(a: &ASet, beta: &LatticeVector, p: u64) -> Vec<EulerOperator> {
    (0..a.dim())
        .map(|i| EulerOperator {
            index: i,
            coefficients: a.vectors().iter().map(|v| v[i]).collect(),
            beta_residue: modp::reduce(beta.0[i], p),
        })
        .collect()
}

impl EulerOperator {
    pub fn apply(&self, f: &GfPoly) -> GfPoly {
        let p = f.p();
        let mut out = GfPoly::zero(p, f.nvars());
        for (u, c) in f.terms() {
            let s: i64 = self
                .coefficients
                .iter()
                .zip(&u.0)
                .map(|(&a, &x)| a * x as i64)
                .sum();
            let k = (modp::reduce(s, p) + p - self.beta_residue) % p;
            out.add_term(u.clone(), c * k % p);
        }
        out
    }
}

/// The `n` Euler residuals of `f`; all zero exactly when `f` satisfies the
/// homogeneity equations mod p.
pub fn euler_residual(a: &ASet, beta: &LatticeVector, f: &GfPoly) -> Result<Vec<GfPoly>> {
    a.check_target(beta)?;
    if f.nvars() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: f.nvars(),
        });
    }
    Ok(euler_operators(a, beta, f.p())
        .iter()
        .map(|z| z.apply(f))
        .collect())
}

pub fn box_residual(op: &BoxOperator, f: &GfPoly) -> GfPoly {
    op.apply(f)
}

/// `sum_u lambda^u / u!` over the given exponent vectors (all entries `< p`).
pub fn factorial_sum(
    p: u64,
    nvars: usize,
    us: &[ExponentVector],
    table: &FactorialTable,
) -> GfPoly {
    let mut f = GfPoly::zero(p, nvars);
    for u in us {
        f.add_term(u.clone(), table.inv_fact_product(&u.0));
    }
    f
}

/// `F_gamma`; `gamma` must be good.
pub fn build_f(a: &ASet, gamma: &LatticeVector, p: u64, cap: u64) -> Result<GfPoly> {
    let g = classify_goodness(a, gamma, p, cap)?;
    if !g.good {
        return Err(Error::NotGood(gamma.0.clone()));
    }
    Ok(factorial_sum(
        p,
        a.len(),
        &g.report.minimals,
        &FactorialTable::new(p),
    ))
}

/// `G_gamma`, the sum over all of `U^+(gamma)`; `gamma` must be very good.
pub fn build_g(a: &ASet, gamma: &LatticeVector, p: u64, cap: u64) -> Result<GfPoly> {
    let g = classify_goodness(a, gamma, p, cap)?;
    match g.very_good {
        Verdict::Yes => {}
        Verdict::No => return Err(Error::NotVeryGood(gamma.0.clone())),
        Verdict::Undecided => {
            return Err(Error::Undecided {
                target: gamma.0.clone(),
                cap,
            })
        }
    }
    let all = enumerate_box(a, gamma, p - 1)?;
    Ok(factorial_sum(p, a.len(), &all, &FactorialTable::new(p)))
}

/// Finite set of relations standing in for "all of `L`" when checking box
/// operators on solutions attached to `gamma`.
pub fn relation_test_set(
    a: &ASet,
    gamma: &LatticeVector,
    p: u64,
    norm_cap: Option<u64>,
) -> Result<Vec<Vec<i64>>> {
    let lattice = relation_kernel_basis(a);
    let cap = norm_cap.unwrap_or(3 * lattice.max_basis_norm());
    let mut set: BTreeSet<Vec<i64>> = lattice
        .combinations(COMBINATION_COEFF, cap)
        .into_iter()
        .collect();
    let reps = enumerate_box(a, gamma, p - 1)?;
    for u in &reps {
        for v in &reps {
            if u != v {
                set.insert(
                    u.0.iter()
                        .zip(&v.0)
                        .map(|(&x, &y)| x as i64 - y as i64)
                        .collect(),
                );
            }
        }
    }
    Ok(set.into_iter().collect())
}

/// Verification record for one solution polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Checks {
    pub euler: bool,
    #[serde(rename = "box")]
    pub boxes: bool,
    pub relations_tested: usize,
    /// For nonconfluent `A`: whether normalized and classical residuals agree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical_agrees: Option<bool>,
    pub failures: Vec<String>,
}

impl Checks {
    pub fn ok(&self) -> bool {
        self.euler && self.boxes && self.classical_agrees != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub gamma: LatticeVector,
    pub weight: u64,
    pub poly: GfPoly,
    pub checks: Checks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionBasis {
    pub beta: LatticeVector,
    pub p: u64,
    /// `F_gamma` for `gamma` in `sigma_A(beta)`.
    pub f_basis: Vec<BasisElement>,
    /// `G_gamma` for `gamma` in `tau_A(beta)`, checked against the classical system.
    pub g_basis: Vec<BasisElement>,
    pub tau_undecided: Vec<LatticeVector>,
    pub supports_disjoint: bool,
}

impl SolutionBasis {
    pub fn all_ok(&self) -> bool {
        self.supports_disjoint
            && self
                .f_basis
                .iter()
                .chain(&self.g_basis)
                .all(|b| b.checks.ok())
    }
}

/// Checks `f` against the Euler operators for `beta` and the box operators of
/// `kind` over `relations`.
pub fn verify_solution(
    a: &ASet,
    beta: &LatticeVector,
    f: &GfPoly,
    relations: &[Vec<i64>],
    kind: BoxKind,
) -> Result<Checks> {
    let mut failures = Vec::new();
    let euler = euler_residual(a, beta, f)?;
    for (i, r) in euler.iter().enumerate() {
        if !r.is_zero() {
            failures.push(format!("Euler operator {} leaves {}", i + 1, r));
        }
    }
    let euler_ok = failures.is_empty();
    let mut classical_agrees = a.nonconfluent_form().map(|_| true);
    for l in relations {
        let op = BoxOperator::new(a, l.clone(), kind)?;
        let r = op.apply(f);
        if !r.is_zero() {
            failures.push(format!("box operator for {l:?} leaves {r}"));
        }
        if kind == BoxKind::Normalized && classical_agrees == Some(true) {
            let classical = BoxOperator::new(a, l.clone(), BoxKind::Classical)?.apply(f);
            if classical != r {
                classical_agrees = Some(false);
                failures.push(format!(
                    "classical and normalized residuals differ for {l:?}"
                ));
            }
        }
    }
    let boxes_ok = failures.len()
        == usize::from(!euler_ok) * euler.iter().filter(|r| !r.is_zero()).count()
        && classical_agrees != Some(false);
    Ok(Checks {
        euler: euler_ok,
        boxes: boxes_ok,
        relations_tested: relations.len(),
        classical_agrees,
        failures,
    })
}

/// Builds and verifies `{F_gamma : gamma in sigma_A(beta)}` (and the `G_gamma`
/// for very good `gamma`).
pub fn solution_basis(
    a: &ASet,
    beta: &LatticeVector,
    p: u64,
    caps: &Caps,
) -> Result<SolutionBasis> {
    let catalog = sigma_tau(a, beta, p, caps.weight_cap)?;
    let table = FactorialTable::new(p);
    let mut f_basis = Vec::new();
    let mut seen: BTreeSet<ExponentVector> = BTreeSet::new();
    let mut supports_disjoint = true;
    for (gamma, report) in &catalog.sigma {
        let f = factorial_sum(p, a.len(), &report.minimals, &table);
        for u in &report.minimals {
            supports_disjoint &= seen.insert(u.clone());
        }
        let relations = relation_test_set(a, gamma, p, caps.relation_norm_cap)?;
        let checks = verify_solution(a, beta, &f, &relations, BoxKind::Normalized)?;
        f_basis.push(BasisElement {
            gamma: gamma.clone(),
            weight: report.weight.unwrap_or(0),
            poly: f,
            checks,
        });
    }
    let mut g_basis = Vec::new();
    for gamma in &catalog.tau {
        let all = enumerate_box(a, gamma, p - 1)?;
        let g = factorial_sum(p, a.len(), &all, &table);
        let relations = relation_test_set(a, gamma, p, caps.relation_norm_cap)?;
        let checks = verify_solution(a, beta, &g, &relations, BoxKind::Classical)?;
        let weight = all.iter().map(ExponentVector::total).min().unwrap_or(0);
        g_basis.push(BasisElement {
            gamma: gamma.clone(),
            weight,
            poly: g,
            checks,
        });
    }
    Ok(SolutionBasis {
        beta: beta.clone(),
        p,
        f_basis,
        g_basis,
        tau_undecided: catalog.tau_undecided,
        supports_disjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kloosterman() -> ASet {
        ASet::from_rows(vec![vec![1], vec![-1]]).unwrap()
    }

    fn example1() -> ASet {
        ASet::from_rows(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, -1],
        ])
        .unwrap()
    }

    fn poly(p: u64, nvars: usize, terms: &[(&[u64], i64)]) -> GfPoly {
        GfPoly::from_terms(p, nvars, terms.iter().map(|(e, c)| (e.to_vec(), *c))).unwrap()
    }

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    #[test]
    fn build_f_examples() {
        let f = build_f(&example1(), &lv(&[1, 1, 0]), 3, 40).unwrap();
        assert_eq!(f, poly(3, 4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]));
        let f = build_f(&example1(), &lv(&[2, 2, 0]), 5, 40).unwrap();
        assert_eq!(
            f,
            poly(
                5,
                4,
                &[(&[2, 2, 0, 0], 4), (&[1, 1, 1, 1], 1), (&[0, 0, 2, 2], 4)]
            )
        );
        assert_eq!(
            build_f(&example1(), &lv(&[0, 0, 0]), 5, 40).unwrap(),
            GfPoly::one(5, 4)
        );
        assert!(matches!(
            build_f(&kloosterman(), &lv(&[5]), 5, 40),
            Err(Error::NotGood(_))
        ));
    }

    #[test]
    fn build_g_examples() {
        let g = build_g(&example1(), &lv(&[1, 1, 0]), 3, 40).unwrap();
        assert_eq!(g, poly(3, 4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]));
        assert_eq!(
            build_g(&example1(), &lv(&[0, 0, 0]), 3, 40).unwrap(),
            GfPoly::one(3, 4)
        );
        for gamma in -4..=4 {
            assert!(matches!(
                build_g(&kloosterman(), &lv(&[gamma]), 5, 40),
                Err(Error::NotVeryGood(_))
            ));
        }
    }

    #[test]
    fn euler_residual_examples() {
        let f = build_f(&example1(), &lv(&[1, 1, 0]), 3, 40).unwrap();
        assert!(euler_residual(&example1(), &lv(&[1, 1, 0]), &f)
            .unwrap()
            .iter()
            .all(GfPoly::is_zero));
        let l1 = GfPoly::var(7, 2, 0);
        assert_eq!(
            euler_residual(&kloosterman(), &lv(&[0]), &l1).unwrap(),
            vec![l1.clone()]
        );
        assert!(
            euler_residual(&kloosterman(), &lv(&[0]), &GfPoly::zero(7, 2))
                .unwrap()
                .iter()
                .all(GfPoly::is_zero)
        );
    }

    #[test]
    fn box_residual_examples() {
        let f = poly(3, 4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]);
        let op = BoxOperator::new(&example1(), vec![-1, -1, 1, 1], BoxKind::Normalized).unwrap();
        assert_eq!(op.branch(), Branch::Balanced);
        assert!(box_residual(&op, &f).is_zero());
        let op = BoxOperator::new(&kloosterman(), vec![1, 1], BoxKind::Normalized).unwrap();
        assert_eq!(op.branch(), Branch::PositiveSum);
        assert!(box_residual(&op, &poly(5, 2, &[(&[3, 0], 1)])).is_zero());
        assert!(!box_residual(&op, &poly(5, 2, &[(&[1, 1], 1)])).is_zero());
        assert!(box_residual(&op, &GfPoly::constant(5, 2, 3)).is_zero());
        assert!(BoxOperator::new(&kloosterman(), vec![1, 0], BoxKind::Normalized).is_err());
    }

    #[test]
    fn relation_test_sets() {
        let set = relation_test_set(&example1(), &lv(&[1, 1, 0]), 3, None).unwrap();
        assert!(set.contains(&vec![-1, -1, 1, 1]) && set.contains(&vec![1, 1, -1, -1]));
        let id = ASet::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(relation_test_set(&id, &lv(&[1, 1]), 3, None)
            .unwrap()
            .is_empty());
        let set = relation_test_set(&kloosterman(), &lv(&[2]), 5, None).unwrap();
        for l in [[1, 1], [2, 2], [-1, -1], [-2, -2]] {
            assert!(set.contains(&l.to_vec()));
        }
    }

    #[test]
    fn solution_basis_examples() {
        let caps = Caps::defaults(5, 1, 2);
        let b = solution_basis(&kloosterman(), &lv(&[2]), 5, &caps).unwrap();
        let got: Vec<(LatticeVector, GfPoly)> = b
            .f_basis
            .iter()
            .map(|e| (e.gamma.clone(), e.poly.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (lv(&[-3]), poly(5, 2, &[(&[0, 3], 1)])),
                (lv(&[2]), poly(5, 2, &[(&[2, 0], 3)]))
            ]
        );
        assert!(b.all_ok());

        let caps = Caps::defaults(3, 1, 4);
        let b = solution_basis(&example1(), &lv(&[1, 1, 0]), 3, &caps).unwrap();
        let f = poly(3, 4, &[(&[1, 1, 0, 0], 1), (&[0, 0, 1, 1], 1)]);
        assert!(b
            .f_basis
            .iter()
            .any(|e| e.gamma == lv(&[1, 1, 0]) && e.poly == f));
        assert!(b.all_ok());
        assert!(b
            .f_basis
            .iter()
            .all(|e| e.checks.classical_agrees == Some(true)));

        let five = ASet::from_rows(vec![vec![5]]).unwrap();
        let b = solution_basis(&five, &lv(&[1]), 5, &Caps::defaults(5, 1, 1)).unwrap();
        assert!(b.f_basis.is_empty());
    }
}
