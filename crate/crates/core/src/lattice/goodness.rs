use std::collections::BTreeSet;

use serde::Serialize;

use super::search::{
    semigroup_member, weight_and_minimals, Membership, SearchStatus, WeightReport,
};
use super::ASet;
use crate::error::{Error, Result};
use crate::vector::LatticeVector;

/// Three-valued answer for questions that reduce to capped membership tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Goodness {
    pub good: bool,
    pub very_good: Verdict,
    pub report: WeightReport,
}

/// Good and very good points of one residue class `beta + pZ^n` inside `NA`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodnessCatalog {
    pub residue_class: LatticeVector,
    pub p: u64,
    pub sigma: Vec<(LatticeVector, WeightReport)>,
    pub tau: Vec<LatticeVector>,
    /// Good points whose very-goodness could not be settled within the cap.
    pub tau_undecided: Vec<LatticeVector>,
}

impl GoodnessCatalog {
    pub fn sigma_points(&self) -> impl Iterator<Item = &LatticeVector> {
        self.sigma.iter().map(|(g, _)| g)
    }
}

/// Decides whether `gamma` is good and whether it is very good.
///
/// `gamma` must lie in `NA`; points outside are rejected. Goodness is always
/// decided once a representation is known, because the witness bounds the
/// level search. Very-goodness asks whether `gamma - p a_i` lies in `NA` for
/// some `i`, and is reported as undecided when one of those searches runs out
/// of cap on a non-pointed `A`.
pub fn classify_goodness(a: &ASet, gamma: &LatticeVector, p: u64, cap: u64) -> Result<Goodness> {
    let report = weight_and_minimals(a, gamma, cap)?;
    match report.status {
        SearchStatus::Found => {}
        SearchStatus::Absent => return Err(Error::NotInSemigroup(gamma.0.clone())),
        SearchStatus::NotFoundUpToCap => {
            return Err(Error::Undecided {
                target: gamma.0.clone(),
                cap,
            })
        }
    }
    let good = report.minimals.iter().all(|u| u.max_entry() < p);
    let very_good = if good {
        very_good_verdict(a, gamma, p, cap)?
    } else {
        Verdict::No
    };
    Ok(Goodness {
        good,
        very_good,
        report,
    })
}

fn very_good_verdict(a: &ASet, gamma: &LatticeVector, p: u64, cap: u64) -> Result<Verdict> {
    let mut undecided = false;
    for i in 0..a.len() {
        let shifted = gamma.sub_scaled(&LatticeVector(a.vector(i).to_vec()), p as i64);
        match semigroup_member(a, &shifted, cap)? {
            Membership::Member(_) => return Ok(Verdict::No),
            Membership::Absent => {}
            Membership::NotFoundUpToCap => undecided = true,
        }
    }
    Ok(if undecided {
        Verdict::Undecided
    } else {
        Verdict::Yes
    })
}

/// All sums `sum c_i a_i` with `c_i in {0, ..., p-1}`, built by folding the
/// generators in one at a time and deduplicating after each step.
pub fn candidate_points(a: &ASet, p: u64) -> BTreeSet<LatticeVector> {
    let mut reach: BTreeSet<Vec<i64>> = BTreeSet::from([vec![0; a.dim()]]);
    for v in a.vectors() {
        let mut next = BTreeSet::new();
        for s in &reach {
            let mut cur = s.clone();
            next.insert(cur.clone());
            for _ in 1..p {
                for (x, &y) in cur.iter_mut().zip(v) {
                    *x += y;
                }
                next.insert(cur.clone());
            }
        }
        reach = next;
    }
    reach.into_iter().map(LatticeVector).collect()
}

/// `sigma_A(beta)` and `tau_A(beta)`, in lexicographic order.
pub fn sigma_tau(a: &ASet, beta: &LatticeVector, p: u64, cap: u64) -> Result<GoodnessCatalog> {
    a.check_target(beta)?;
    // every candidate has a representation of weight <= N(p-1)
    let cap = cap.max(a.len() as u64 * (p - 1));
    let mut cat = GoodnessCatalog {
        residue_class: beta.clone(),
        p,
        sigma: Vec::new(),
        tau: Vec::new(),
        tau_undecided: Vec::new(),
    };
    for gamma in candidate_points(a, p) {
        if !gamma.congruent(beta, p as i64) {
            continue;
        }
        let g = classify_goodness(a, &gamma, p, cap)?;
        if !g.good {
            continue;
        }
        match g.very_good {
            Verdict::Yes => cat.tau.push(gamma.clone()),
            Verdict::Undecided => cat.tau_undecided.push(gamma.clone()),
            Verdict::No => {}
        }
        cat.sigma.push((gamma, g.report));
    }
    Ok(cat)
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

    #[test]
    fn example1_point_is_very_good() {
        for p in [3u64, 5, 7] {
            let m = (p as i64 - 1) / 2;
            let g = classify_goodness(&example1(), &LatticeVector(vec![m, m, 0]), p, 100).unwrap();
            assert!(g.good);
            assert_eq!(g.very_good, Verdict::Yes);
            assert_eq!(g.report.weight, Some(p - 1));
        }
    }

    #[test]
    fn kloosterman_goodness() {
        let kl = kloosterman();
        let g = classify_goodness(&kl, &LatticeVector(vec![5]), 5, 50).unwrap();
        assert!(!g.good);
        let g = classify_goodness(&kl, &LatticeVector(vec![1]), 5, 50).unwrap();
        assert!(g.good);
        assert_eq!(g.very_good, Verdict::No);
        let g = classify_goodness(&kl, &LatticeVector(vec![-4]), 5, 50).unwrap();
        assert!(g.good);
    }

    #[test]
    fn outside_semigroup_is_rejected() {
        let even = ASet::from_rows(vec![vec![2]]).unwrap();
        assert!(matches!(
            classify_goodness(&even, &LatticeVector(vec![3]), 3, 10),
            Err(Error::NotInSemigroup(_))
        ));
    }

    #[test]
    fn sigma_tau_kloosterman() {
        let cat = sigma_tau(&kloosterman(), &LatticeVector(vec![2]), 5, 40).unwrap();
        let sigma: Vec<_> = cat.sigma_points().cloned().collect();
        assert_eq!(sigma, vec![LatticeVector(vec![-3]), LatticeVector(vec![2])]);
        assert_eq!(cat.sigma[0].1.weight, Some(3));
        assert_eq!(cat.sigma[1].1.weight, Some(2));
        assert!(cat.tau.is_empty());
    }

    #[test]
    fn sigma_tau_example1() {
        let cat = sigma_tau(&example1(), &LatticeVector(vec![1, 1, 0]), 3, 40).unwrap();
        assert!(cat.sigma_points().any(|g| g.0 == vec![1, 1, 0]));
        assert!(cat.tau.contains(&LatticeVector(vec![1, 1, 0])));
    }

    #[test]
    fn sigma_tau_empty_class() {
        let even = ASet::from_rows(vec![vec![2]]).unwrap();
        let cat = sigma_tau(&even, &LatticeVector(vec![1]), 3, 10).unwrap();
        // candidates 0, 2, 4 are all even; 1 + 3Z meets them at 4
        let sigma: Vec<_> = cat.sigma_points().cloned().collect();
        assert_eq!(sigma, vec![LatticeVector(vec![4])]);
        assert_eq!(cat.tau, vec![LatticeVector(vec![4])]);
        let even5 = ASet::from_rows(vec![vec![5]]).unwrap();
        let cat = sigma_tau(&even5, &LatticeVector(vec![1]), 5, 10).unwrap();
        assert!(cat.sigma.is_empty() && cat.tau.is_empty());
    }

    #[test]
    fn candidates_are_all_box_sums() {
        let pts = candidate_points(&kloosterman(), 3);
        let v: Vec<i64> = pts.iter().map(|g| g.0[0]).collect();
        assert_eq!(v, vec![-2, -1, 0, 1, 2]);
    }
}
