use serde::Serialize;

use super::ASet;
use crate::error::Result;
use crate::vector::{ExponentVector, LatticeVector};

/// Outcome of a capped search in `NA`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    /// Proven absent: a linear form separates the target from the cone of `A`,
    /// or the pointedness bound was reached.
    Absent,
    NotFoundUpToCap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Member(ExponentVector),
    Absent,
    NotFoundUpToCap,
}

/// Weight `w(beta)` together with every minimal representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightReport {
    pub target: LatticeVector,
    pub weight: Option<u64>,
    pub minimals: Vec<ExponentVector>,
    pub cap_used: u64,
    pub status: SearchStatus,
}

impl WeightReport {
    pub fn is_found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

/// Searches `U^+(beta)` level by level in total weight and returns the first
/// witness found, lexicographically smallest within the lowest level.
pub fn semigroup_member(a: &ASet, beta: &LatticeVector, cap: u64) -> Result<Membership> {
    a.check_target(beta)?;
    if a.refutes(&beta.0) {
        return Ok(Membership::Absent);
    }
    let decision = a.decision_level(&beta.0);
    let top = decision.map_or(cap, |d| d.min(cap));
    for s in 0..=top {
        if let Some(u) = at_level(a, &beta.0, s, true).pop() {
            return Ok(Membership::Member(u));
        }
    }
    Ok(match decision {
        Some(d) if d <= cap => Membership::Absent,
        _ => Membership::NotFoundUpToCap,
    })
}

/// Computes `w(beta)` and `U^+_min(beta)` by exhaustive search at each weight
/// level `0, 1, ..., cap` (or up to the pointedness bound when smaller).
pub fn weight_and_minimals(a: &ASet, beta: &LatticeVector, cap: u64) -> Result<WeightReport> {
    a.check_target(beta)?;
    let mut report = WeightReport {
        target: beta.clone(),
        weight: None,
        minimals: Vec::new(),
        cap_used: cap,
        status: SearchStatus::Absent,
    };
    if a.refutes(&beta.0) {
        return Ok(report);
    }
    let decision = a.decision_level(&beta.0);
    let top = decision.map_or(cap, |d| d.min(cap));
    for s in 0..=top {
        let mut sols = at_level(a, &beta.0, s, false);
        if !sols.is_empty() {
            sols.sort();
            report.weight = Some(s);
            report.minimals = sols;
            report.status = SearchStatus::Found;
            return Ok(report);
        }
    }
    if !matches!(decision, Some(d) if d <= cap) {
        report.status = SearchStatus::NotFoundUpToCap;
    }
    Ok(report)
}

/// `U^+_k(beta)`: all representations with every entry at most `k`, sorted.
pub fn enumerate_box(a: &ASet, beta: &LatticeVector, k: u64) -> Result<Vec<ExponentVector>> {
    a.check_target(beta)?;
    let mut out = Vec::new();
    let mut u = vec![0u64; a.len()];
    let mut rest = beta.0.clone();
    box_dfs(a, k as i64, 0, &mut rest, &mut u, &mut out);
    out.sort();
    Ok(out)
}

fn box_dfs(
    a: &ASet,
    k: i64,
    i: usize,
    rest: &mut [i64],
    u: &mut [u64],
    out: &mut Vec<ExponentVector>,
) {
    if i == a.len() {
        if rest.iter().all(|&x| x == 0) {
            out.push(ExponentVector(u.to_vec()));
        }
        return;
    }
    let v = a.vector(i);
    for c in 0..=k {
        // rest now holds beta minus everything chosen so far, minus c * a_i
        if c > 0 {
            for (r, &x) in rest.iter_mut().zip(v) {
                *r -= x;
            }
        }
        let (neg, pos) = a.suffix_signed(i + 1);
        let feasible = rest
            .iter()
            .zip(neg.iter().zip(pos))
            .all(|(&r, (&lo, &hi))| k * lo <= r && r <= k * hi);
        if feasible {
            u[i] = c as u64;
            box_dfs(a, k, i + 1, rest, u, out);
            u[i] = 0;
        }
    }
    for (r, &x) in rest.iter_mut().zip(v) {
        *r += k * x;
    }
}

/// All `u` with `sum u_i = s` and `sum u_i a_i = target`.
fn at_level(a: &ASet, target: &[i64], s: u64, first_only: bool) -> Vec<ExponentVector> {
    let mut out = Vec::new();
    let mut u = vec![0u64; a.len()];
    let mut rest = target.to_vec();
    level_dfs(a, 0, s as i64, &mut rest, &mut u, first_only, &mut out);
    out
}

fn level_dfs(
    a: &ASet,
    i: usize,
    remaining: i64,
    rest: &mut [i64],
    u: &mut [u64],
    first_only: bool,
    out: &mut Vec<ExponentVector>,
) -> bool {
    let v = a.vector(i);
    if i + 1 == a.len() {
        if rest.iter().zip(v).all(|(&r, &x)| r == remaining * x) {
            u[i] = remaining as u64;
            out.push(ExponentVector(u.to_vec()));
            u[i] = 0;
            return first_only;
        }
        return false;
    }
    let mut stop = false;
    for c in 0..=remaining {
        if c > 0 {
            for (r, &x) in rest.iter_mut().zip(v) {
                *r -= x;
            }
        }
        let left = remaining - c;
        let (lo, hi) = a.suffix_bounds(i + 1);
        let feasible = rest
            .iter()
            .zip(lo.iter().zip(hi))
            .all(|(&r, (&l, &h))| left * l <= r && r <= left * h);
        if feasible {
            u[i] = c as u64;
            stop = level_dfs(a, i + 1, left, rest, u, first_only, out);
            u[i] = 0;
            if stop {
                // restore before unwinding
                for (r, &x) in rest.iter_mut().zip(v) {
                    *r += c * x;
                }
                return true;
            }
        }
    }
    for (r, &x) in rest.iter_mut().zip(v) {
        *r += remaining * x;
    }
    stop
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

    fn ev(v: &[u64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    /// Independent brute force over the box {0..=k}^N.
    fn brute_box(a: &ASet, beta: &[i64], k: u64) -> Vec<ExponentVector> {
        let n = a.len();
        let side = k + 1;
        let mut out = Vec::new();
        for idx in 0..side.pow(n as u32) {
            let mut t = idx;
            let u: Vec<u64> = (0..n)
                .map(|_| {
                    let d = t % side;
                    t /= side;
                    d
                })
                .collect();
            if a.combine(&u).0 == beta {
                out.push(ExponentVector(u));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn membership_examples() {
        let kl = kloosterman();
        assert_eq!(
            semigroup_member(&kl, &LatticeVector(vec![3]), 10).unwrap(),
            Membership::Member(ev(&[3, 0]))
        );
        let ex1 = example1();
        assert_eq!(
            semigroup_member(&ex1, &LatticeVector(vec![0, 0, 0]), 0).unwrap(),
            Membership::Member(ev(&[0, 0, 0, 0]))
        );
        match semigroup_member(&ex1, &LatticeVector(vec![2, 2, 0]), 10).unwrap() {
            Membership::Member(u) => assert_eq!(ex1.combine(&u.0).0, vec![2, 2, 0]),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn pointed_membership_is_decided() {
        let ex1 = example1();
        // third coordinate can only be negative through a_4, which raises the others
        let res = semigroup_member(&ex1, &LatticeVector(vec![0, 0, -1]), 100).unwrap();
        assert_eq!(res, Membership::Absent);
        let even = ASet::from_rows(vec![vec![2]]).unwrap();
        assert_eq!(
            semigroup_member(&even, &LatticeVector(vec![7]), 100).unwrap(),
            Membership::Absent
        );
        // cap below the pointedness bound stays undecided
        assert_eq!(
            semigroup_member(&even, &LatticeVector(vec![7]), 1).unwrap(),
            Membership::NotFoundUpToCap
        );
    }

    #[test]
    fn non_pointed_without_certificate_is_undecided() {
        let a = ASet::from_rows(vec![vec![2], vec![-2]]).unwrap();
        assert_eq!(
            semigroup_member(&a, &LatticeVector(vec![1]), 6).unwrap(),
            Membership::NotFoundUpToCap
        );
        let r = weight_and_minimals(&a, &LatticeVector(vec![1]), 6).unwrap();
        assert_eq!(r.status, SearchStatus::NotFoundUpToCap);
        assert!(r.minimals.is_empty());
    }

    #[test]
    fn weights_of_kloosterman_points() {
        let kl = kloosterman();
        let r = weight_and_minimals(&kl, &LatticeVector(vec![-4]), 20).unwrap();
        assert_eq!(r.weight, Some(4));
        assert_eq!(r.minimals, vec![ev(&[0, 4])]);
        let r = weight_and_minimals(&kl, &LatticeVector(vec![0]), 0).unwrap();
        assert_eq!(r.weight, Some(0));
        assert_eq!(r.minimals, vec![ev(&[0, 0])]);
    }

    #[test]
    fn weights_of_example1_point() {
        let r = weight_and_minimals(&example1(), &LatticeVector(vec![2, 2, 0]), 20).unwrap();
        assert_eq!(r.weight, Some(4));
        assert_eq!(
            r.minimals,
            vec![ev(&[0, 0, 2, 2]), ev(&[1, 1, 1, 1]), ev(&[2, 2, 0, 0])]
        );
    }

    #[test]
    fn box_examples() {
        let kl = kloosterman();
        let diag: Vec<ExponentVector> = (0..=8).map(|u| ev(&[u, u])).collect();
        assert_eq!(
            enumerate_box(&kl, &LatticeVector(vec![0]), 8).unwrap(),
            diag
        );
        assert_eq!(
            enumerate_box(&example1(), &LatticeVector(vec![1, 1, 0]), 2).unwrap(),
            brute_box(&example1(), &[1, 1, 0], 2)
        );
        assert_eq!(
            enumerate_box(&example1(), &LatticeVector(vec![1, 1, 0]), 2).unwrap(),
            vec![ev(&[0, 0, 1, 1]), ev(&[1, 1, 0, 0])]
        );
        assert!(
            enumerate_box(&example1(), &LatticeVector(vec![0, 0, -5]), 3)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn box_matches_brute_force_on_skewed_set() {
        let a = ASet::from_rows(vec![vec![2, -1], vec![-1, 1], vec![0, 2], vec![1, 1]]).unwrap();
        for b0 in -3..=3 {
            for b1 in -3..=3 {
                assert_eq!(
                    enumerate_box(&a, &LatticeVector(vec![b0, b1]), 3).unwrap(),
                    brute_box(&a, &[b0, b1], 3)
                );
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert!(weight_and_minimals(&kloosterman(), &LatticeVector(vec![1, 2]), 3).is_err());
    }
}
