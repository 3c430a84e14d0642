//! Hasse invariants of exponential sums `S(f_lambda, e)` over `F_q`.
//!
//! In the toric case the invariant is
//!
//! ```text
//! H = (-1)^n sum over (gamma_0, ..., gamma_{a-1}) in Gamma_M of
//!       F_{gamma_0}(lambda) F_{gamma_1}(lambda^p) ... F_{gamma_{a-1}}(lambda^{p^{a-1}})
//! ```
//!
//! and it is computed twice: once as this product and once directly as
//! `(-1)^n sum_{u in U_{M,min}} lambda^u / prod_{j,k} u_j^(k)!`. The two must
//! agree. The valuation numerator is `C = w_p(M)`.
//!
//! In the affine case (variables `m+1..n` range over all of `F_q`) each layer
//! `M_l` is handled separately. Layers satisfy
//! `w_p(M_l) + a(n-m-l)(p-1) >= w_p(M_{n-m})`, and exactly the layers with
//! equality contribute, with sign `(-1)^(m+l)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::GfPoly;
use crate::lattice::ASet;
use crate::modp::FactorialTable;
use crate::problem::ProblemSpec;
use crate::pweight::{digits, enumerate_u_m, gamma_sequences, wp_min, GammaSequence, MSpec};
use crate::solutions::factorial_sum;
use crate::vector::ExponentVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerReport {
    pub l: usize,
    pub wp: Option<u64>,
    /// `w_p(M_l) + a(n-m-l)(p-1) - w_p(M_{n-m})`; zero means selected.
    pub slack: Option<i64>,
    pub selected: bool,
    pub empty: bool,
    pub gamma_sequences: Vec<GammaSequence>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HasseResult {
    #[serde(rename = "H")]
    pub h: GfPoly,
    #[serde(rename = "C")]
    pub c: Option<u64>,
    pub q: u64,
    pub layers: Vec<LayerReport>,
    pub gamma_sequences: Vec<GammaSequence>,
    pub empty: bool,
    pub verified: bool,
}

/// Dispatches on whether every variable is toric.
pub fn hasse(spec: &ProblemSpec) -> Result<HasseResult> {
    if spec.is_toric() {
        hasse_toric(spec)
    } else {
        hasse_affine(spec)
    }
}

/// One `M` (or layer): its p-weight, classes, and the signless sum.
struct Piece {
    wp: u64,
    classes: Vec<GammaSequence>,
    sum: GfPoly,
}

fn piece(a_set: &ASet, mspec: &MSpec, table: &FactorialTable) -> Result<Option<Piece>> {
    let us = enumerate_u_m(a_set, mspec)?;
    if us.is_empty() {
        return Ok(None);
    }
    let (_, mins) = wp_min(&us, mspec.p)?;
    let decomposition = gamma_sequences(a_set, mspec, &mins)?;
    let product = product_form(a_set.len(), mspec.p, &decomposition.classes, table)?;
    let direct = direct_form(a_set, mspec, &mins, table)?;
    if product != direct {
        return Err(Error::Consistency(format!(
            "product form {product} differs from direct form {direct}"
        )));
    }
    Ok(Some(Piece {
        wp: decomposition.wp,
        classes: decomposition.classes,
        sum: product,
    }))
}

/// `sum over classes of prod_k F_{gamma_k}(lambda^{p^k})`.
fn product_form(
    nvars: usize,
    p: u64,
    classes: &[GammaSequence],
    table: &FactorialTable,
) -> Result<GfPoly> {
    let mut total = GfPoly::zero(p, nvars);
    for class in classes {
        let mut term = GfPoly::one(p, nvars);
        for (k, mins) in class.minimals.iter().enumerate() {
            let f = factorial_sum(p, nvars, mins, table).frobenius_twist(k as u32)?;
            term = term.checked_mul(&f)?;
        }
        total = total.checked_add(&term)?;
    }
    Ok(total)
}

/// `sum_{u in U_{M,min}} lambda^u / prod_{j,k} u_j^(k)!`.
fn direct_form(
    a_set: &ASet,
    mspec: &MSpec,
    mins: &[ExponentVector],
    table: &FactorialTable,
) -> Result<GfPoly> {
    let p = mspec.p;
    let mut total = GfPoly::zero(p, a_set.len());
    for u in mins {
        let d = digits(a_set, u, p, mspec.a)?;
        let c = d
            .digits
            .iter()
            .fold(1, |acc, row| acc * table.inv_fact_product(row) % p);
        total.add_term(u.clone(), c);
    }
    Ok(total)
}

fn check_degree(h: &GfPoly, q: u64) -> Result<()> {
    for i in 0..h.nvars() {
        if h.degree_in(i) > q - 1 {
            return Err(Error::Consistency(format!(
                "degree of H in lambda_{} exceeds q - 1",
                i + 1
            )));
        }
    }
    Ok(())
}

fn sign(h: GfPoly, exponent: usize) -> GfPoly {
    if exponent.is_multiple_of(2) {
        h
    } else {
        h.neg()
    }
}

/// Hasse invariant of the toric family; `spec.m` must equal `spec.n`.
pub fn hasse_toric(spec: &ProblemSpec) -> Result<HasseResult> {
    spec.validate()?;
    if !spec.is_toric() {
        return Err(Error::InvalidInput("toric computation needs m = n".into()));
    }
    let a_set = spec.a_set()?;
    let q = spec.q();
    let table = FactorialTable::new(spec.p);
    let mspec = MSpec::toric(spec.e.clone(), spec.p, spec.a);
    let Some(piece) = piece(&a_set, &mspec, &table)? else {
        return Ok(HasseResult {
            h: GfPoly::zero(spec.p, spec.big_n),
            c: None,
            q,
            layers: Vec::new(),
            gamma_sequences: Vec::new(),
            empty: true,
            verified: true,
        });
    };
    let h = sign(piece.sum, spec.n);
    check_degree(&h, q)?;
    if h.is_zero() {
        return Err(Error::Consistency(
            "H vanishes although U_M is nonempty".into(),
        ));
    }
    Ok(HasseResult {
        h,
        c: Some(piece.wp),
        q,
        layers: Vec::new(),
        gamma_sequences: piece.classes,
        empty: false,
        verified: true,
    })
}

/// Checks the standing hypotheses of the affine case.
pub fn check_affine_hypotheses(spec: &ProblemSpec) -> Result<()> {
    spec.validate()?;
    if spec.is_toric() {
        return Err(Error::InvalidInput("affine computation needs m < n".into()));
    }
    for j in spec.m..spec.n {
        if spec.matrix.iter().any(|row| row[j] < 0) {
            return Err(Error::Hypothesis(format!(
                "coordinate {} of A takes negative values",
                j + 1
            )));
        }
        if spec.matrix.iter().all(|row| row[j] == 0) {
            return Err(Error::Hypothesis(format!(
                "A lies in the coordinate hyperplane x_{} = 0",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Hasse invariant of the family with variables `m+1..n` affine.
pub fn hasse_affine(spec: &ProblemSpec) -> Result<HasseResult> {
    check_affine_hypotheses(spec)?;
    let a_set = spec.a_set()?;
    let q = spec.q();
    let p = spec.p;
    let table = FactorialTable::new(p);
    let top = spec.n - spec.m;
    let mut pieces = Vec::with_capacity(top + 1);
    for l in 0..=top {
        let mspec = MSpec::affine_layer(spec.e.clone(), p, spec.a, spec.m, l);
        pieces.push(piece(&a_set, &mspec, &table)?);
    }
    if pieces.iter().all(Option::is_none) {
        return Err(Error::Hypothesis("every layer M_l is empty".into()));
    }
    let Some(c) = pieces[top].as_ref().map(|pc| pc.wp) else {
        return Err(Error::Hypothesis(format!(
            "layer M_{top} is empty, so C is undefined"
        )));
    };
    let step = spec.a as i64 * (p as i64 - 1);
    let mut h = GfPoly::zero(p, spec.big_n);
    let mut layers = Vec::with_capacity(top + 1);
    for (l, pc) in pieces.into_iter().enumerate() {
        let Some(pc) = pc else {
            layers.push(LayerReport {
                l,
                wp: None,
                slack: None,
                selected: false,
                empty: true,
                gamma_sequences: Vec::new(),
            });
            continue;
        };
        let slack = pc.wp as i64 + step * (top - l) as i64 - c as i64;
        if slack < 0 {
            return Err(Error::Consistency(format!(
                "layer inequality fails for l = {l}"
            )));
        }
        let selected = slack == 0;
        if selected {
            if pc.classes.is_empty() {
                return Err(Error::Consistency(format!(
                    "selected layer {l} has no gamma sequences"
                )));
            }
            h = h.checked_add(&sign(pc.sum, spec.m + l))?;
        }
        layers.push(LayerReport {
            l,
            wp: Some(pc.wp),
            slack: Some(slack),
            selected,
            empty: false,
            gamma_sequences: pc.classes,
        });
    }
    check_degree(&h, q)?;
    Ok(HasseResult {
        h,
        c: Some(c),
        q,
        layers,
        gamma_sequences: Vec::new(),
        empty: false,
        verified: true,
    })
}

/// Case label of the twisted Kloosterman family `A = {1, -1}` for the
/// tabulated extension degrees, or `None` for other inputs.
pub fn kloosterman_case_label(spec: &ProblemSpec) -> Option<String> {
    if spec.matrix != [vec![1], vec![-1]] || !spec.is_toric() {
        return None;
    }
    let p = spec.p;
    let e = spec.e.0[0].rem_euclid(spec.q() as i64 - 1) as u64;
    let half = (p - 1) / 2;
    match spec.a {
        1 => Some(
            match e.cmp(&half) {
                std::cmp::Ordering::Less => "q = p, e < (p-1)/2",
                std::cmp::Ordering::Equal => "q = p, e = (p-1)/2",
                std::cmp::Ordering::Greater => "q = p, e > (p-1)/2",
            }
            .to_string(),
        ),
        2 if p >= 5 => {
            let (e0, e1) = (e % p, e / p);
            Some(match kloosterman_square_case(p, e0, e1) {
                0 => "q = p^2, e = 0".to_string(),
                c => format!("q = p^2, case {c}"),
            })
        }
        _ => None,
    }
}

/// Case number (1..=11) of `e = e0 + e1 p` in the `q = p^2` Kloosterman
/// table, or 0 for `e = 0`. Requires `p >= 5`.
pub fn kloosterman_square_case(p: u64, e0: u64, e1: u64) -> u8 {
    let (h3, h, hp) = ((p - 3) / 2, (p - 1) / 2, p.div_ceil(2));
    match (e0, e1) {
        (0, 0) => 0,
        _ if (e0 <= h3 && e1 < hp) || (e0 == h && e1 < h) => 1,
        _ if (e0 >= hp && e1 > h3) || (e0 == h && e1 > h) => 2,
        _ if e0 > hp && e1 < h3 => 3,
        _ if e0 < h3 && e1 > hp => 4,
        _ if e0 == hp && e1 < h3 => 5,
        _ if e0 == h3 && e1 > hp => 6,
        _ if e0 == h && e1 == h => 7,
        _ if e0 < h3 && e1 == hp => 8,
        _ if e0 > hp && e1 == h3 => 9,
        _ if e0 == hp && e1 == h3 => 10,
        _ => 11,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kloosterman(p: u64, a: u32, e: i64) -> ProblemSpec {
        ProblemSpec::toric(p, a, vec![vec![1], vec![-1]], vec![e]).unwrap()
    }

    #[test]
    fn kloosterman_prime_field() {
        let h = hasse(&kloosterman(7, 1, 2)).unwrap();
        assert_eq!(h.h.to_string(), "3*l1^2");
        assert_eq!(h.c, Some(2));
        let h = hasse(&kloosterman(5, 1, 2)).unwrap();
        assert_eq!(h.h.to_string(), "2*l2^2 + 2*l1^2");
        assert_eq!(h.c, Some(2));
    }

    #[test]
    fn kloosterman_square_field_case_5() {
        let h = hasse(&kloosterman(5, 2, 3)).unwrap();
        let expected = GfPoly::from_terms(5, 2, [(vec![3, 0], 4), (vec![5, 2], 2)]).unwrap();
        assert_eq!(h.h, expected);
        assert_eq!(h.gamma_sequences.len(), 2);
        assert_eq!(kloosterman_square_case(5, 3, 0), 5);
    }

    #[test]
    fn empty_u_m_gives_zero() {
        let spec = ProblemSpec::toric(2, 2, vec![vec![3]], vec![1]).unwrap();
        let h = hasse(&spec).unwrap();
        assert!(h.empty && h.h.is_zero() && h.c.is_none());
    }

    #[test]
    fn affine_diagonal_quadric() {
        let spec = ProblemSpec::affine(3, 1, vec![vec![2, 0, 1], vec![0, 2, 1]], vec![0, 0, 0], 0)
            .unwrap();
        let h = hasse(&spec).unwrap();
        let selected: Vec<usize> = h
            .layers
            .iter()
            .filter(|l| l.selected)
            .map(|l| l.l)
            .collect();
        assert_eq!(selected, vec![3]);
        // H = -F_{(2,2,2)} = -lambda_1 lambda_2
        assert_eq!(h.h, GfPoly::from_terms(3, 2, [(vec![1, 1], -1)]).unwrap());
        assert_eq!(h.h.evaluate(&[1, 1]).unwrap(), 2);
    }

    #[test]
    fn affine_hypothesis_violation() {
        let spec = ProblemSpec::affine(3, 1, vec![vec![1, 0]], vec![0, 0], 1).unwrap();
        assert!(matches!(hasse(&spec), Err(Error::Hypothesis(_))));
    }
}
