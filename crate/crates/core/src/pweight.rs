//! Base-p digits, p-weights and the sets `U_M`.
//!
//! For `q = p^a` and `u in {0..q-1}^N` write `u_i = sum_k u_i^(k) p^k`. The
//! digit rows `u^(k)` give lattice points `gamma_k = sum_i u_i^(k) a_i` with
//! `sum_k p^k gamma_k = sum_i u_i a_i`, and the p-weight `w_p(u)` is the total
//! digit sum. Always `w_p(u) >= sum_k w(gamma_k)`, with equality exactly when
//! every row `u^(k)` is a minimal representation of `gamma_k`.
//!
//! `U_M` collects the `u` whose image lands in `M = e + (q-1)Z^n` (optionally
//! restricted to one affine layer). The minimizers of `w_p` on `U_M` split
//! into classes indexed by sequences `(gamma_0, ..., gamma_{a-1})` of good
//! points, and each class is the full product of the minimal sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{weight_and_minimals, ASet, WeightReport};
use crate::vector::{ExponentVector, LatticeVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DigitDecomposition {
    pub u: ExponentVector,
    /// `digits[k][i] = u_i^(k)`.
    pub digits: Vec<Vec<u64>>,
    pub gammas: Vec<LatticeVector>,
    pub pweight: u64,
    /// Digit sum `S(u_i)` of each entry.
    pub digit_sums: Vec<u64>,
}

impl DigitDecomposition {
    /// `sum_k p^k gamma_k`.
    pub fn image(&self, p: u64) -> LatticeVector {
        let n = self.gammas.first().map_or(0, LatticeVector::len);
        let mut out = vec![0i64; n];
        let mut scale = 1i64;
        for g in &self.gammas {
            for (x, &y) in out.iter_mut().zip(&g.0) {
                *x += scale * y;
            }
            scale *= p as i64;
        }
        LatticeVector(out)
    }
}

/// `q = p^a`, rejecting values that do not fit comfortably in 32 bits.
pub fn field_size(p: u64, a: u32) -> Result<u64> {
    match p.checked_pow(a) {
        Some(q) if q <= 1 << 32 => Ok(q),
        _ => Err(Error::Overflow),
    }
}

/// Base-p digits of `u` with `a` digits per entry.
pub fn digits(a_set: &ASet, u: &ExponentVector, p: u64, a: u32) -> Result<DigitDecomposition> {
    a_set.check_exponents(u)?;
    let q = field_size(p, a)?;
    if let Some(&x) = u.0.iter().find(|&&x| x >= q) {
        return Err(Error::InvalidInput(format!(
            "entry {x} exceeds q - 1 = {}",
            q - 1
        )));
    }
    let mut rest = u.0.clone();
    let mut rows = Vec::with_capacity(a as usize);
    for _ in 0..a {
        rows.push(rest.iter().map(|x| x % p).collect::<Vec<u64>>());
        rest.iter_mut().for_each(|x| *x /= p);
    }
    let gammas = rows.iter().map(|r| a_set.combine(r)).collect();
    let digit_sums: Vec<u64> = (0..u.len())
        .map(|i| rows.iter().map(|r| r[i]).sum())
        .collect();
    Ok(DigitDecomposition {
        u: u.clone(),
        pweight: digit_sums.iter().sum(),
        digits: rows,
        gammas,
        digit_sums,
    })
}

/// `w_p(u)` without building the full decomposition.
pub fn pweight(u: &[u64], p: u64) -> u64 {
    u.iter()
        .map(|&x| {
            let (mut x, mut s) = (x, 0);
            while x > 0 {
                s += x % p;
                x /= p;
            }
            s
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MKind {
    Toric,
    /// Points of `M` with exactly `layer` nonzero coordinates among the last
    /// `n - m`.
    AffineLayer {
        m: usize,
        layer: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MSpec {
    pub kind: MKind,
    pub e: LatticeVector,
    pub p: u64,
    pub a: u32,
}

impl MSpec {
    pub fn toric(e: LatticeVector, p: u64, a: u32) -> Self {
        MSpec {
            kind: MKind::Toric,
            e,
            p,
            a,
        }
    }

    pub fn affine_layer(e: LatticeVector, p: u64, a: u32, m: usize, layer: usize) -> Self {
        MSpec {
            kind: MKind::AffineLayer { m, layer },
            e,
            p,
            a,
        }
    }

    pub fn q(&self) -> Result<u64> {
        field_size(self.p, self.a)
    }

    /// Whether a lattice point lies in `M` (and in the layer, if any).
    pub fn contains(&self, v: &LatticeVector) -> Result<bool> {
        let modulus = (self.q()? - 1) as i64;
        let residues_ok =
            v.0.iter()
                .zip(&self.e.0)
                .all(|(&x, &y)| (x - y).rem_euclid(modulus) == 0);
        Ok(residues_ok
            && match self.kind {
                MKind::Toric => true,
                MKind::AffineLayer { m, layer } => {
                    v.0[m..].iter().filter(|&&x| x != 0).count() == layer
                }
            })
    }

    fn check(&self, a_set: &ASet) -> Result<()> {
        a_set.check_target(&self.e)?;
        if let MKind::AffineLayer { m, layer } = self.kind {
            let n = a_set.dim();
            if m > n || layer > n - m {
                return Err(Error::InvalidInput(format!(
                    "layer {layer} out of range for m = {m}, n = {n}"
                )));
            }
            if n - m > 30 {
                return Err(Error::InvalidInput("too many affine coordinates".into()));
            }
            if a_set
                .vectors()
                .iter()
                .any(|v| v[m..].iter().any(|&x| x < 0))
            {
                return Err(Error::Hypothesis(
                    "affine coordinates of A must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }
}

type Residue = Vec<u64>;

/// Reachable (residue, affine mask) pairs from a suffix of the generators.
type StateSet = HashMap<Residue, Vec<u32>>;

struct Folder<'a> {
    a_set: &'a ASet,
    q: u64,
    modulus: i64,
    target: Residue,
    masks: Vec<u32>,
    layer: Option<usize>,
}

impl Folder<'_> {
    fn new<'a>(a_set: &'a ASet, spec: &MSpec) -> Result<Folder<'a>> {
        spec.check(a_set)?;
        let q = spec.q()?;
        let modulus = (q - 1) as i64;
        let (m, layer) = match spec.kind {
            MKind::Toric => (a_set.dim(), None),
            MKind::AffineLayer { m, layer } => (m, Some(layer)),
        };
        let masks = a_set
            .vectors()
            .iter()
            .map(|v| {
                v[m..]
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0)
                    .fold(0u32, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let target = spec
            .e
            .0
            .iter()
            .map(|&x| x.rem_euclid(modulus) as u64)
            .collect();
        Ok(Folder {
            a_set,
            q,
            modulus,
            target,
            masks,
            layer,
        })
    }

    fn step(&self, r: &[u64], i: usize, u: u64) -> Residue {
        r.iter()
            .zip(self.a_set.vector(i))
            .map(|(&x, &y)| {
                (x as i64 + (u as i64 % self.modulus) * y).rem_euclid(self.modulus) as u64
            })
            .collect()
    }

    fn needed(&self, r: &[u64]) -> Residue {
        r.iter()
            .zip(&self.target)
            .map(|(&x, &t)| (t as i64 - x as i64).rem_euclid(self.modulus) as u64)
            .collect()
    }

    fn mask_ok(&self, mask: u32) -> bool {
        self.layer.is_none_or(|l| mask.count_ones() as usize == l)
    }

    fn suffixes(&self) -> Vec<StateSet> {
        let big_n = self.a_set.len();
        let mut out = vec![StateSet::new(); big_n + 1];
        out[big_n].insert(vec![0; self.a_set.dim()], vec![0]);
        for i in (0..big_n).rev() {
            let mut next = StateSet::new();
            for (r, ms) in &out[i + 1] {
                for u in 0..self.q {
                    let r2 = self.step(r, i, u);
                    let add = if u > 0 { self.masks[i] } else { 0 };
                    let entry = next.entry(r2).or_default();
                    for &mk in ms {
                        if !entry.contains(&(mk | add)) {
                            entry.push(mk | add);
                        }
                    }
                }
            }
            out[i] = next;
        }
        out
    }

    fn dfs(
        &self,
        suff: &[StateSet],
        i: usize,
        r: Residue,
        mask: u32,
        u: &mut Vec<u64>,
        out: &mut Vec<ExponentVector>,
    ) {
        if i == self.a_set.len() {
            out.push(ExponentVector(u.clone()));
            return;
        }
        for x in 0..self.q {
            let r2 = self.step(&r, i, x);
            let mask2 = if x > 0 { mask | self.masks[i] } else { mask };
            let feasible = suff[i + 1]
                .get(&self.needed(&r2))
                .is_some_and(|ms| ms.iter().any(|&mk| self.mask_ok(mask2 | mk)));
            if feasible {
                u.push(x);
                self.dfs(suff, i + 1, r2, mask2, u, out);
                u.pop();
            }
        }
    }
}

/// `U_M`, sorted, by a residue-class fold with backward reachability pruning.
pub fn enumerate_u_m(a_set: &ASet, spec: &MSpec) -> Result<Vec<ExponentVector>> {
    let folder = Folder::new(a_set, spec)?;
    let suff = folder.suffixes();
    let mut out = Vec::new();
    let start = vec![0; a_set.dim()];
    if suff[0]
        .get(&folder.needed(&start))
        .is_some_and(|ms| ms.iter().any(|&mk| folder.mask_ok(mk)))
    {
        folder.dfs(
            &suff,
            0,
            start,
            0,
            &mut Vec::with_capacity(a_set.len()),
            &mut out,
        );
    }
    out.sort();
    Ok(out)
}

/// `U_M` by scanning the whole box `{0..q-1}^N`; refuses when `q^N > budget`.
pub fn enumerate_u_m_naive(a_set: &ASet, spec: &MSpec, budget: u64) -> Result<Vec<ExponentVector>> {
    spec.check(a_set)?;
    let q = spec.q()?;
    let needed = (q as u128).pow(a_set.len() as u32);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    let mut u = vec![0u64; a_set.len()];
    loop {
        if spec.contains(&a_set.combine(&u))? {
            out.push(ExponentVector(u.clone()));
        }
        let Some(i) = u.iter().rposition(|&x| x + 1 < q) else {
            break;
        };
        u[i] += 1;
        u[i + 1..].iter_mut().for_each(|x| *x = 0);
    }
    Ok(out)
}

/// `w_p(M)` and `U_{M,min}`.
pub fn wp_min(us: &[ExponentVector], p: u64) -> Result<(u64, Vec<ExponentVector>)> {
    let w = us
        .iter()
        .map(|u| pweight(&u.0, p))
        .min()
        .ok_or(Error::EmptyUm)?;
    let mut mins: Vec<ExponentVector> = us
        .iter()
        .filter(|u| pweight(&u.0, p) == w)
        .cloned()
        .collect();
    mins.sort();
    Ok((w, mins))
}

/// Memoized `w(gamma)` / `U^+_min(gamma)` lookups.
#[derive(Default)]
pub struct WeightMemo {
    cache: HashMap<LatticeVector, WeightReport>,
}

impl WeightMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// `cap` must be at least the weight of some known representation.
    pub fn get(&mut self, a_set: &ASet, gamma: &LatticeVector, cap: u64) -> Result<&WeightReport> {
        let stale = self
            .cache
            .get(gamma)
            .is_none_or(|r| !r.is_found() && r.cap_used < cap);
        if stale {
            let r = weight_and_minimals(a_set, gamma, cap)?;
            self.cache.insert(gamma.clone(), r);
        }
        Ok(&self.cache[gamma])
    }
}

/// Checks `w_p(u) >= sum_k w(gamma_k)` and the equality criterion for one `u`.
/// Returns whether equality holds.
pub fn check_digit_inequality(
    a_set: &ASet,
    u: &ExponentVector,
    p: u64,
    a: u32,
    memo: &mut WeightMemo,
) -> Result<bool> {
    let d = digits(a_set, u, p, a)?;
    let mut total = 0;
    let mut all_minimal = true;
    for (row, gamma) in d.digits.iter().zip(&d.gammas) {
        let report = memo.get(a_set, gamma, row.iter().sum())?;
        let w = report.weight.ok_or_else(|| {
            Error::Consistency(format!("digit image {gamma} has no representation"))
        })?;
        total += w;
        all_minimal &= report.minimals.iter().any(|m| m.0 == *row);
    }
    if d.pweight < total {
        return Err(Error::Consistency(format!(
            "w_p({}) = {} < {}",
            u, d.pweight, total
        )));
    }
    let equal = d.pweight == total;
    if equal != all_minimal {
        return Err(Error::Consistency(format!(
            "equality criterion fails for {u}"
        )));
    }
    Ok(equal)
}

/// One class of `U_{M,min}`: the minimizers whose digit rows map to a fixed
/// sequence of good points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaSequence {
    pub gammas: Vec<LatticeVector>,
    pub weights: Vec<u64>,
    /// `U^+_min(gamma_k)` for each `k`.
    #[serde(skip)]
    pub minimals: Vec<Vec<ExponentVector>>,
    pub members: Vec<ExponentVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimizerDecomposition {
    pub wp: u64,
    pub classes: Vec<GammaSequence>,
}

/// Splits `U_{M,min}` into classes by digit images and verifies that each
/// class is a product of minimal sets of good points.
pub fn gamma_sequences(
    a_set: &ASet,
    spec: &MSpec,
    minimizers: &[ExponentVector],
) -> Result<MinimizerDecomposition> {
    let p = spec.p;
    let mut memo = WeightMemo::new();
    let mut groups: BTreeMap<Vec<LatticeVector>, BTreeSet<ExponentVector>> = BTreeMap::new();
    let mut wp = None;
    for u in minimizers {
        let d = digits(a_set, u, p, spec.a)?;
        if *wp.get_or_insert(d.pweight) != d.pweight {
            return Err(Error::Consistency(
                "minimizers have different p-weights".into(),
            ));
        }
        if !spec.contains(&d.image(p))? {
            return Err(Error::Consistency(format!("{u} does not map into M")));
        }
        groups.entry(d.gammas).or_default().insert(u.clone());
    }
    let wp = wp.ok_or(Error::EmptyUm)?;
    let mut classes = Vec::with_capacity(groups.len());
    for (gammas, members) in groups {
        let mut weights = Vec::new();
        let mut minimals = Vec::new();
        for g in &gammas {
            let r = memo.get(a_set, g, wp)?;
            let (Some(w), true) = (r.weight, r.is_found()) else {
                return Err(Error::Consistency(format!(
                    "no minimal representation of {g} within {wp}"
                )));
            };
            if r.minimals.iter().any(|m| m.max_entry() >= p) {
                return Err(Error::Consistency(format!("digit image {g} is not good")));
            }
            weights.push(w);
            minimals.push(r.minimals.clone());
        }
        if weights.iter().sum::<u64>() != wp {
            return Err(Error::Consistency(format!(
                "weights of {gammas:?} do not sum to w_p(M) = {wp}"
            )));
        }
        let assembled = assemble(&minimals, p, a_set.len());
        if assembled != members {
            return Err(Error::Consistency(format!(
                "class of {gammas:?} is not the full product of minimal sets"
            )));
        }
        classes.push(GammaSequence {
            gammas,
            weights,
            minimals,
            members: members.into_iter().collect(),
        });
    }
    Ok(MinimizerDecomposition { wp, classes })
}

/// All `sum_k p^k u^(k)` with `u^(k)` drawn from `sets[k]`.
fn assemble(sets: &[Vec<ExponentVector>], p: u64, big_n: usize) -> BTreeSet<ExponentVector> {
    let mut acc: BTreeSet<ExponentVector> = BTreeSet::from([ExponentVector::zero(big_n)]);
    let mut scale = 1;
    for set in sets {
        acc = acc
            .iter()
            .flat_map(|base| {
                set.iter().map(move |v| {
                    ExponentVector(
                        base.0
                            .iter()
                            .zip(&v.0)
                            .map(|(&b, &x)| b + scale * x)
                            .collect(),
                    )
                })
            })
            .collect();
        scale *= p;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kloosterman() -> ASet {
        ASet::from_rows(vec![vec![1], vec![-1]]).unwrap()
    }

    fn ev(v: &[u64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    #[test]
    fn digit_examples() {
        let d = digits(&kloosterman(), &ev(&[7, 5]), 3, 2).unwrap();
        assert_eq!(d.digits, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(d.gammas, vec![lv(&[-1]), lv(&[1])]);
        assert_eq!(d.pweight, 6);
        assert_eq!(d.image(3), lv(&[2]));
        let d = digits(&kloosterman(), &ev(&[8, 8]), 3, 2).unwrap();
        assert_eq!(d.pweight, 2 * 2 * 2);
        assert_eq!(
            digits(&kloosterman(), &ev(&[0, 0]), 3, 2).unwrap().pweight,
            0
        );
        assert!(digits(&kloosterman(), &ev(&[9, 0]), 3, 2).is_err());
    }

    #[test]
    fn u_m_examples() {
        let us = enumerate_u_m(&kloosterman(), &MSpec::toric(lv(&[0]), 3, 2)).unwrap();
        let mut expected: Vec<ExponentVector> = (0..9).map(|u| ev(&[u, u])).collect();
        expected.extend([ev(&[8, 0]), ev(&[0, 8])]);
        expected.sort();
        assert_eq!(us, expected);

        let single = ASet::from_rows(vec![vec![3]]).unwrap();
        assert!(enumerate_u_m(&single, &MSpec::toric(lv(&[1]), 2, 2))
            .unwrap()
            .is_empty());

        let us = enumerate_u_m(&kloosterman(), &MSpec::toric(lv(&[2]), 5, 1)).unwrap();
        let mut expected = vec![
            ev(&[2, 0]),
            ev(&[3, 1]),
            ev(&[4, 2]),
            ev(&[0, 2]),
            ev(&[1, 3]),
            ev(&[2, 4]),
        ];
        expected.sort();
        assert_eq!(us, expected);
    }

    #[test]
    fn q_equal_two_is_the_full_box() {
        let a = ASet::from_rows(vec![vec![1, 0], vec![3, -1]]).unwrap();
        let spec = MSpec::toric(lv(&[0, 0]), 2, 1);
        assert_eq!(enumerate_u_m(&a, &spec).unwrap().len(), 4);
        assert_eq!(
            enumerate_u_m(&a, &spec).unwrap(),
            enumerate_u_m_naive(&a, &spec, 100).unwrap()
        );
    }

    #[test]
    fn dp_matches_naive_on_layers() {
        let a = ASet::from_rows(vec![
            vec![1, 1, 0],
            vec![-1, 0, 1],
            vec![2, 1, 1],
            vec![0, 0, 1],
        ])
        .unwrap();
        for layer in 0..=2 {
            for e in -2..=2 {
                let spec = MSpec::affine_layer(lv(&[e, 0, 0]), 5, 1, 1, layer);
                assert_eq!(
                    enumerate_u_m(&a, &spec).unwrap(),
                    enumerate_u_m_naive(&a, &spec, 1 << 20).unwrap()
                );
            }
        }
        assert!(enumerate_u_m_naive(&a, &MSpec::toric(lv(&[0, 0, 0]), 5, 2), 1000).is_err());
    }

    #[test]
    fn wp_min_examples() {
        let k = kloosterman();
        let (w, mins) = wp_min(
            &enumerate_u_m(&k, &MSpec::toric(lv(&[0]), 3, 2)).unwrap(),
            3,
        )
        .unwrap();
        assert_eq!((w, mins), (0, vec![ev(&[0, 0])]));
        let (w, mins) = wp_min(
            &enumerate_u_m(&k, &MSpec::toric(lv(&[2]), 5, 1)).unwrap(),
            5,
        )
        .unwrap();
        assert_eq!((w, mins), (2, vec![ev(&[0, 2]), ev(&[2, 0])]));
        let (w, mins) = wp_min(
            &enumerate_u_m(&k, &MSpec::toric(lv(&[1]), 7, 1)).unwrap(),
            7,
        )
        .unwrap();
        assert_eq!((w, mins), (1, vec![ev(&[1, 0])]));
        assert_eq!(wp_min(&[], 5), Err(Error::EmptyUm));
    }

    fn sequences(p: u64, a: u32, e: i64) -> Vec<Vec<LatticeVector>> {
        let k = kloosterman();
        let spec = MSpec::toric(lv(&[e]), p, a);
        let (_, mins) = wp_min(&enumerate_u_m(&k, &spec).unwrap(), p).unwrap();
        gamma_sequences(&k, &spec, &mins)
            .unwrap()
            .classes
            .into_iter()
            .map(|c| c.gammas)
            .collect()
    }

    #[test]
    fn gamma_sequence_examples() {
        assert_eq!(
            sequences(5, 2, 3),
            vec![vec![lv(&[-2]), lv(&[1])], vec![lv(&[3]), lv(&[0])]]
        );
        assert_eq!(sequences(3, 2, 0), vec![vec![lv(&[0]), lv(&[0])]]);
        assert_eq!(
            sequences(5, 2, 12),
            vec![vec![lv(&[-2]), lv(&[-2])], vec![lv(&[2]), lv(&[2])]]
        );
    }

    #[test]
    fn equality_criterion_on_all_of_u_m() {
        let k = kloosterman();
        let mut memo = WeightMemo::new();
        for e in 0..24 {
            let us = enumerate_u_m(&k, &MSpec::toric(lv(&[e]), 5, 2)).unwrap();
            let (w, _) = wp_min(&us, 5).unwrap();
            for u in &us {
                let eq = check_digit_inequality(&k, u, 5, 2, &mut memo).unwrap();
                if pweight(&u.0, 5) == w {
                    assert!(eq, "{u}");
                }
            }
        }
    }
}
