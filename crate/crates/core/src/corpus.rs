//! Reference instances, closed-form tables, and the ten acceptance checks.
//!
//! The closed forms here are transcribed independently of the pipeline: the
//! Example 1 polynomial in factorial and binomial form, and the twisted
//! Kloosterman tables for `q = p` and `q = p^2`. Random instances come from a
//! fixed ChaCha seed so every run sees the same corpus.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gfpoly::GfPoly;
use crate::hasse::{hasse_affine, hasse_toric, kloosterman_square_case};
use crate::lattice::{enumerate_box, ASet};
use crate::modp::{self, FactorialTable};
use crate::oracle::{
    example3_check, katz_coefficient_check, legendre_check, naive_crosscheck, HypersurfaceFamily,
};
use crate::problem::{Caps, ProblemSpec};
use crate::pweight::{
    check_digit_inequality, enumerate_u_m, gamma_sequences, wp_min, MSpec, WeightMemo,
};
use crate::series::{support_profile, verify_series_reduction, Minimality};
use crate::solutions::{build_f, solution_basis};
use crate::vector::{ExponentVector, LatticeVector};

pub const SEED: u64 = 0x5eed_2024;

pub fn example1_rows() -> Vec<Vec<i64>> {
    vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]]
}

pub fn kloosterman_rows() -> Vec<Vec<i64>> {
    vec![vec![1], vec![-1]]
}

/// `sum_l lambda_1^{m-l} lambda_2^{m-l} lambda_3^l lambda_4^l / ((m-l)!^2 l!^2)`.
pub fn example1_factorial_form(p: u64) -> GfPoly {
    let m = (p - 1) / 2;
    let t = FactorialTable::new(p);
    let mut f = GfPoly::zero(p, 4);
    for l in 0..=m {
        let c = t.inv_fact_product(&[m - l, m - l, l, l]);
        f.add_term(ExponentVector(vec![m - l, m - l, l, l]), c);
    }
    f
}

/// `-(-lambda_1 lambda_2)^m sum_l C(m,l)^2 (lambda_3 lambda_4 / lambda_1 lambda_2)^l`.
pub fn example1_binomial_form(p: u64) -> GfPoly {
    let m = (p - 1) / 2;
    let sign: i64 = if m.is_multiple_of(2) { -1 } else { 1 };
    let mut f = GfPoly::zero(p, 4);
    for l in 0..=m {
        let c = modp::binomial(m, l, p);
        f.add_term(
            ExponentVector(vec![m - l, m - l, l, l]),
            modp::reduce(sign * (c * c % p) as i64, p),
        );
    }
    f
}

/// `(-1)^{(p+1)/2} ((p-1)/2)!^2 mod p`.
pub fn example1_rescaling(p: u64) -> u64 {
    let m = (p - 1) / 2;
    let f = FactorialTable::new(p).fact(m);
    let s = f * f % p;
    if p.div_ceil(2).is_multiple_of(2) {
        s
    } else {
        (p - s) % p
    }
}

fn monomial_term(p: u64, exps: [u64; 2], denominators: &[u64], t: &FactorialTable) -> GfPoly {
    let c = t.inv_fact_product(denominators);
    GfPoly::monomial(p, exps.to_vec(), -(c as i64))
}

/// The `q = p` Kloosterman invariant and its valuation numerator.
pub fn kloosterman_prime_table(p: u64, e: u64) -> (GfPoly, u64) {
    let m = (p - 1) / 2;
    let t = FactorialTable::new(p);
    match e.cmp(&m) {
        std::cmp::Ordering::Less => (monomial_term(p, [e, 0], &[e], &t), e),
        std::cmp::Ordering::Greater => (
            monomial_term(p, [0, p - 1 - e], &[p - 1 - e], &t),
            p - 1 - e,
        ),
        std::cmp::Ordering::Equal => {
            let h = monomial_term(p, [m, 0], &[m], &t)
                .checked_add(&monomial_term(p, [0, m], &[m], &t))
                .unwrap();
            (h, m)
        }
    }
}

/// The sequences `Gamma_1..Gamma_4` for `e = e0 + e1 p`, as `(gamma_0, gamma_1)`.
pub fn kloosterman_square_candidates(p: u64, e0: u64, e1: u64) -> [(i64, i64); 4] {
    let (p, e0, e1) = (p as i64, e0 as i64, e1 as i64);
    [
        (e0, e1),
        (e0 - p, e1 + 1),
        (e0 - (p - 1), e1 - (p - 1)),
        (e0 + 1, e1 - p),
    ]
}

/// `Gamma_M` as listed for each case (indices into the four candidates).
pub fn kloosterman_square_gamma_m(p: u64, e0: u64, e1: u64) -> Vec<(i64, i64)> {
    let idx: &[usize] = match kloosterman_square_case(p, e0, e1) {
        0 => return vec![(0, 0)],
        1 => &[0],
        2 => &[2],
        3 => &[1],
        4 => &[3],
        5 => &[0, 1],
        6 => &[2, 3],
        7 => &[0, 2],
        8 => &[0, 3],
        9 => &[1, 2],
        10 => &[0, 1, 2],
        _ => &[0, 2, 3],
    };
    let c = kloosterman_square_candidates(p, e0, e1);
    idx.iter().map(|&i| c[i]).collect()
}

/// The displayed `q = p^2` invariant: one term per member of `Gamma_M`.
pub fn kloosterman_square_h(p: u64, e0: u64, e1: u64) -> GfPoly {
    let t = FactorialTable::new(p);
    let e = e0 + e1 * p;
    if e == 0 {
        return GfPoly::constant(p, 2, -1);
    }
    let c = kloosterman_square_candidates(p, e0, e1);
    let mut h = GfPoly::zero(p, 2);
    for g in kloosterman_square_gamma_m(p, e0, e1) {
        let term = if g == c[0] {
            monomial_term(p, [e, 0], &[e0, e1], &t)
        } else if g == c[1] {
            monomial_term(p, [(e1 + 1) * p, p - e0], &[p - e0, e1 + 1], &t)
        } else if g == c[2] {
            monomial_term(p, [0, p * p - 1 - e], &[p - 1 - e0, p - 1 - e1], &t)
        } else {
            monomial_term(p, [e0 + 1, (p - e1) * p], &[e0 + 1, p - e1], &t)
        };
        h = h.checked_add(&term).unwrap();
    }
    h
}

/// A named toric or affine instance.
#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub name: String,
    pub spec: ProblemSpec,
}

fn random_rows(
    rng: &mut ChaCha8Rng,
    n: usize,
    big_n: usize,
    lo: i64,
    hi: i64,
    affine_from: usize,
) -> Vec<Vec<i64>> {
    let mut rows: BTreeSet<Vec<i64>> = BTreeSet::new();
    while rows.len() < big_n {
        let row: Vec<i64> = (0..n)
            .map(|j| {
                if j >= affine_from {
                    rng.gen_range(0..=hi)
                } else {
                    rng.gen_range(lo..=hi)
                }
            })
            .collect();
        if row.iter().any(|&x| x != 0) {
            rows.insert(row);
        }
    }
    rows.into_iter().collect()
}

/// Random toric configurations: `n <= 3`, `N <= 4`, entries in `[-2, 2]`.
pub fn random_toric_sets(count: usize) -> Vec<Vec<Vec<i64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            let big_n = rng.gen_range(n.max(2)..=4);
            random_rows(&mut rng, n, big_n, -2, 2, n)
        })
        .collect()
}

/// Random affine instances with nonnegative affine columns, none of them zero.
pub fn random_affine_instances(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xaff1);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(0..n);
        let big_n = rng.gen_range(2..=4);
        let rows = random_rows(&mut rng, n, big_n, -2, 2, m);
        if (m..n).any(|j| rows.iter().all(|r| r[j] == 0)) {
            continue;
        }
        let p = [3, 5][rng.gen_range(0..2)];
        let a = rng.gen_range(1..=2);
        let mut e = vec![0i64; n];
        for x in e.iter_mut().take(m) {
            *x = rng.gen_range(-3..=3);
        }
        let spec = ProblemSpec::affine(p, a, rows, e, m).expect("valid by construction");
        out.push(Instance {
            name: format!("affine#{}", out.len()),
            spec,
        });
    }
    out
}

/// Homogeneous families satisfying the point-count hypothesis.
pub fn example3_families() -> Vec<HypersurfaceFamily> {
    let mut v = Vec::new();
    for p in [3, 5, 7] {
        v.push(HypersurfaceFamily::diagonal(p, 2, 2).unwrap());
        v.push(HypersurfaceFamily::new(p, vec![vec![2, 0], vec![1, 1], vec![0, 2]]).unwrap());
    }
    v.push(HypersurfaceFamily::diagonal(7, 2, 3).unwrap());
    v.push(HypersurfaceFamily::diagonal(7, 3, 3).unwrap());
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub detail: String,
    #[serde(serialize_with = "ser_ms")]
    pub elapsed: Duration,
    #[serde(serialize_with = "ser_opt_ms")]
    pub limit: Option<Duration>,
}

fn ser_ms<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

fn ser_opt_ms<S: serde::Serializer>(
    d: &Option<Duration>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match d {
        Some(d) => s.serialize_f64(d.as_secs_f64() * 1000.0),
        None => s.serialize_none(),
    }
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({} checked, {:.1} ms){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checked,
            self.elapsed.as_secs_f64() * 1000.0,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", self.detail)
            }
        )
    }
}

/// Accumulates checks and failures for one criterion.
struct Tally {
    checked: u64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checked: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn error(&mut self, context: &str, e: Error) {
        self.checked += 1;
        self.failures.push(format!("{context}: {e}"));
    }

    fn finish(
        self,
        id: u8,
        name: &str,
        start: Instant,
        limit: Option<Duration>,
    ) -> CriterionOutcome {
        let elapsed = start.elapsed();
        let mut failures = self.failures;
        if let Some(l) = limit {
            if elapsed > l {
                failures.push(format!("took {elapsed:?}, limit {l:?}"));
            }
        }
        let mut detail: Vec<String> = failures.iter().take(5).cloned().collect();
        if failures.len() > 5 {
            detail.push(format!("... {} more", failures.len() - 5));
        }
        detail.extend(self.notes);
        CriterionOutcome {
            id,
            name: name.to_string(),
            passed: failures.is_empty(),
            checked: self.checked,
            detail: detail.join("; "),
            elapsed,
            limit,
        }
    }
}

pub fn criterion_1() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let a = ASet::from_rows(example1_rows()).unwrap();
    for p in [3, 5, 7, 11] {
        let m = ((p - 1) / 2) as i64;
        match build_f(
            &a,
            &LatticeVector(vec![m, m, 0]),
            p,
            Caps::defaults(p, 1, 4).weight_cap,
        ) {
            Ok(f) => {
                t.check(f == example1_factorial_form(p), || {
                    format!("p={p}: factorial form differs: {f}")
                });
                let r = example1_rescaling(p);
                t.check(r == 1, || format!("p={p}: rescaling factor is {r}"));
                let scaled = f.scale(r as i64);
                t.check(scaled == example1_binomial_form(p), || {
                    format!("p={p}: binomial form differs: {scaled}")
                });
            }
            Err(e) => t.error(&format!("p={p}"), e),
        }
    }
    t.finish(
        1,
        "Example 1 closed forms",
        start,
        Some(Duration::from_secs(1)),
    )
}

pub fn criterion_2() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for p in [3, 5, 7, 11, 13] {
        let per_p = Instant::now();
        for e in 0..=p - 2 {
            let spec = ProblemSpec::toric(p, 1, kloosterman_rows(), vec![e as i64]).unwrap();
            match hasse_toric(&spec) {
                Ok(r) => {
                    let (h, c) = kloosterman_prime_table(p, e);
                    t.check(r.h == h && r.c == Some(c), || {
                        format!("p={p} e={e}: got {} (C={:?}), table {h} (C={c})", r.h, r.c)
                    });
                }
                Err(err) => t.error(&format!("p={p} e={e}"), err),
            }
        }
        let el = per_p.elapsed();
        t.check(el <= Duration::from_secs(1), || {
            format!("p={p} took {el:?}")
        });
    }
    t.finish(2, "Kloosterman q = p table", start, None)
}

pub fn criterion_3() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for p in [5, 7, 11] {
        let per_p = Instant::now();
        for e1 in 0..p {
            for e0 in 0..p {
                let e = (e0 + e1 * p) as i64;
                let spec = ProblemSpec::toric(p, 2, kloosterman_rows(), vec![e]).unwrap();
                match hasse_toric(&spec) {
                    Ok(r) => {
                        let mut got: Vec<(i64, i64)> = r
                            .gamma_sequences
                            .iter()
                            .map(|s| (s.gammas[0].0[0], s.gammas[1].0[0]))
                            .collect();
                        got.sort();
                        let mut want = kloosterman_square_gamma_m(p, e0, e1);
                        want.sort();
                        let case = kloosterman_square_case(p, e0, e1);
                        t.check(got == want, || {
                            format!(
                                "p={p} e=({e0},{e1}) case {case}: Gamma_M {got:?}, table {want:?}"
                            )
                        });
                        let h = kloosterman_square_h(p, e0, e1);
                        t.check(r.h == h, || {
                            format!("p={p} e=({e0},{e1}) case {case}: H = {}, table {h}", r.h)
                        });
                    }
                    Err(err) => t.error(&format!("p={p} e=({e0},{e1})"), err),
                }
            }
        }
        let el = per_p.elapsed();
        t.check(el <= Duration::from_secs(30), || {
            format!("p={p} took {el:?}")
        });
    }
    t.finish(3, "Kloosterman q = p^2 table", start, None)
}

/// Named `(A, beta, p)` case for the annihilation and series checks.
pub type SolutionCase = (String, Vec<Vec<i64>>, Vec<i64>, u64);

/// `(A, beta, p)` triples for the annihilation and series checks.
pub fn solution_corpus() -> Vec<SolutionCase> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7] {
        let m = ((p - 1) / 2) as i64;
        out.push((format!("example1 p={p}"), example1_rows(), vec![m, m, 0], p));
        out.push((
            format!("example1 p={p} beta=(1,0,2)"),
            example1_rows(),
            vec![1, 0, 2],
            p,
        ));
        for beta in 0..p as i64 {
            out.push((
                format!("kloosterman p={p} beta={beta}"),
                kloosterman_rows(),
                vec![beta],
                p,
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xb0c5);
    for (k, rows) in random_toric_sets(8).into_iter().enumerate() {
        let p = [3u64, 5, 7][k % 3];
        let a = ASet::from_rows(rows.clone()).unwrap();
        let u: Vec<u64> = (0..a.len()).map(|_| rng.gen_range(0..p)).collect();
        let beta = a.combine(&u).0;
        out.push((format!("random#{k} p={p}"), rows, beta, p));
    }
    out
}

pub fn criterion_4() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut elements = 0u64;
    let mut relations = 0u64;
    let mut random_nonempty = 0;
    for (name, rows, beta, p) in solution_corpus() {
        let a = ASet::from_rows(rows).unwrap();
        let caps = Caps::defaults(p, 1, a.len());
        match solution_basis(&a, &LatticeVector(beta), p, &caps) {
            Ok(b) => {
                for el in &b.f_basis {
                    elements += 1;
                    relations += el.checks.relations_tested as u64;
                    t.check(el.checks.ok(), || {
                        format!(
                            "{name} gamma={}: {}",
                            el.gamma,
                            el.checks.failures.join(", ")
                        )
                    });
                }
                t.check(b.supports_disjoint, || format!("{name}: supports overlap"));
                if name.starts_with("random") && !b.f_basis.is_empty() {
                    random_nonempty += 1;
                }
            }
            Err(e) => t.error(&name, e),
        }
    }
    t.check(random_nonempty >= 5, || {
        format!("only {random_nonempty} random sets give solutions")
    });
    t.notes.push(format!(
        "{elements} solutions, {relations} box operators, {random_nonempty} random sets"
    ));
    t.finish(4, "Euler and box annihilation", start, None)
}

/// Toric instances with `q in {p, p^2}` for the digit checks.
pub fn pweight_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for p in [3u64, 5, 7] {
        for a in [1u32, 2] {
            let q = p.pow(a);
            for e in 0..(q - 1) as i64 {
                let spec = ProblemSpec::toric(p, a, kloosterman_rows(), vec![e]).unwrap();
                out.push(Instance {
                    name: format!("kloosterman q={q} e={e}"),
                    spec,
                });
            }
        }
    }
    for (p, a) in [(3u64, 1u32), (3, 2), (5, 1), (5, 2)] {
        for e in [vec![0, 0, 0], vec![1, 1, 0], vec![2, 1, 3]] {
            let spec = ProblemSpec::toric(p, a, example1_rows(), e.clone()).unwrap();
            out.push(Instance {
                name: format!("example1 q={} e={e:?}", p.pow(a)),
                spec,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5e9);
    for (k, rows) in random_toric_sets(8).into_iter().enumerate() {
        let (p, a) = [(3u64, 1u32), (5, 1), (3, 2), (5, 2)][k % 4];
        let n = rows[0].len();
        let e: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let spec = ProblemSpec::toric(p, a, rows, e).unwrap();
        out.push(Instance {
            name: format!("random#{k} q={}", p.pow(a)),
            spec,
        });
    }
    out
}

fn check_partition(
    t: &mut Tally,
    name: &str,
    a: &ASet,
    ms: &MSpec,
    memo: &mut WeightMemo,
) -> Result<()> {
    let us = enumerate_u_m(a, ms)?;
    if us.is_empty() {
        return Ok(());
    }
    let (_, mins) = wp_min(&us, ms.p)?;
    let dec = gamma_sequences(a, ms, &mins)?;
    let mut union = BTreeSet::new();
    let mut total = 0;
    for c in &dec.classes {
        total += c.members.len();
        union.extend(c.members.iter().cloned());
    }
    let cover: BTreeSet<ExponentVector> = mins.iter().cloned().collect();
    t.check(total == union.len() && union == cover, || {
        format!("{name}: classes do not partition U_M,min")
    });
    for u in &us {
        check_digit_inequality(a, u, ms.p, ms.a, memo)?;
    }
    t.checked += us.len() as u64;
    Ok(())
}

pub fn criterion_5() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut instances = pweight_corpus();
    instances.extend(random_affine_instances(8));
    for inst in &instances {
        let a = inst.spec.a_set().unwrap();
        let mut memo = WeightMemo::new();
        let specs = if inst.spec.is_toric() {
            vec![MSpec::toric(inst.spec.e.clone(), inst.spec.p, inst.spec.a)]
        } else {
            (0..=inst.spec.n - inst.spec.m)
                .map(|l| {
                    MSpec::affine_layer(
                        inst.spec.e.clone(),
                        inst.spec.p,
                        inst.spec.a,
                        inst.spec.m,
                        l,
                    )
                })
                .collect()
        };
        for ms in &specs {
            if let Err(e) = check_partition(&mut t, &inst.name, &a, ms, &mut memo) {
                t.error(&inst.name, e);
            }
        }
        if (inst.spec.q() as u128).pow(inst.spec.big_n as u32) <= 1_000_000 {
            match naive_crosscheck(&inst.spec) {
                Ok(r) => t.check(r.passed, || {
                    format!("{}: {}", inst.name, r.failures.join(", "))
                }),
                Err(e) => t.error(&inst.name, e),
            }
        }
    }
    t.finish(5, "digit partition and equality criterion", start, None)
}

pub fn criterion_6() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for fam in example3_families() {
        match example3_check(&fam, 100_000_000) {
            Ok(r) if r.skipped.is_some() => {
                t.check(false, || format!("{}: hypothesis fails", r.instance))
            }
            Ok(r) => {
                t.checked += r.checked.saturating_sub(1);
                t.check(r.passed, || {
                    format!("{}: {}", r.instance, r.failures.join(", "))
                });
            }
            Err(e) => t.error(&fam.label(), e),
        }
    }
    t.finish(
        6,
        "point counts against H",
        start,
        Some(Duration::from_secs(60)),
    )
}

pub fn criterion_7() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for fam in example3_families() {
        match katz_coefficient_check(&fam) {
            Ok(r) => {
                t.check(r.checked > 0 && r.skipped.is_none(), || {
                    format!("{}: nothing to check", r.instance)
                });
                t.checked += r.checked;
                t.check(r.passed, || {
                    format!("{}: {}", r.instance, r.failures.join(", "))
                });
            }
            Err(e) => t.error(&fam.label(), e),
        }
    }
    t.finish(7, "Katz coefficient identity", start, None)
}

pub fn criterion_8() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let a1 = ASet::from_rows(example1_rows()).unwrap();
    for p in [3u64, 5, 7] {
        let m = (p - 1) / 2;
        match verify_series_reduction(
            &a1,
            &ExponentVector(vec![m, m, 0, 0]),
            p,
            Caps::defaults(p, 1, 4).weight_cap,
            None,
        ) {
            Ok(r) => t.check(r.passed(), || {
                format!("example1 p={p}: {}", r.failures.join(", "))
            }),
            Err(e) => t.error(&format!("example1 p={p}"), e),
        }
    }
    let (mut refuted, mut unknown) = (0, 0);
    for (name, rows, beta, p) in solution_corpus() {
        let a = ASet::from_rows(rows).unwrap();
        let caps = Caps::defaults(p, 1, a.len());
        let Ok(basis) = solution_basis(&a, &LatticeVector(beta), p, &caps) else {
            continue;
        };
        for el in &basis.f_basis {
            let mins = match enumerate_box(&a, &el.gamma, p - 1) {
                Ok(all) => all
                    .into_iter()
                    .filter(|u| u.total() == el.weight)
                    .collect::<Vec<_>>(),
                Err(e) => {
                    t.error(&name, e);
                    continue;
                }
            };
            for u0 in mins {
                match support_profile(&a, &u0, p, caps.relation_norm_cap).map(|s| s.minimality) {
                    Ok(Minimality::Verified) => {}
                    Ok(Minimality::RefutedBy(_)) => {
                        refuted += 1;
                        continue;
                    }
                    Ok(Minimality::UnknownUpToCap) => {
                        unknown += 1;
                        continue;
                    }
                    Err(e) => {
                        t.error(&name, e);
                        continue;
                    }
                }
                match verify_series_reduction(&a, &u0, p, caps.weight_cap, caps.relation_norm_cap) {
                    Ok(r) => t.check(r.passed(), || {
                        format!("{name} u0={u0}: {}", r.failures.join(", "))
                    }),
                    Err(e) => t.error(&format!("{name} u0={u0}"), e),
                }
            }
        }
    }
    t.notes.push(format!(
        "{refuted} base points with non-minimal support, {unknown} undecided"
    ));
    t.finish(8, "truncated series reduction", start, None)
}

pub fn criterion_9() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    for p in [3, 5, 7, 11, 13] {
        match legendre_check(p, 100_000_000) {
            Ok(r) => {
                t.checked += r.checked.saturating_sub(1);
                t.check(r.passed, || format!("p={p}: {}", r.failures.join(", ")));
            }
            Err(e) => t.error(&format!("p={p}"), e),
        }
    }
    t.finish(
        9,
        "Legendre supersingularity",
        start,
        Some(Duration::from_secs(10)),
    )
}

/// Affine instances for the layer inequality: augmented point-count
/// families plus random ones.
pub fn affine_corpus() -> Vec<Instance> {
    let mut out: Vec<Instance> = example3_families()
        .into_iter()
        .map(|f| Instance {
            name: f.label(),
            spec: f.augmented().unwrap(),
        })
        .collect();
    out.extend(random_affine_instances(12));
    out
}

pub fn criterion_10() -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut skipped = 0;
    for inst in affine_corpus() {
        match hasse_affine(&inst.spec) {
            Ok(r) => {
                for l in r.layers.iter().filter(|l| !l.empty) {
                    t.check(l.slack.is_some_and(|s| s >= 0), || {
                        format!("{} layer {}", inst.name, l.l)
                    });
                }
            }
            Err(Error::Hypothesis(_)) => skipped += 1,
            Err(e) => t.error(&inst.name, e),
        }
    }
    t.notes
        .push(format!("{skipped} instances with an empty top layer"));
    t.finish(10, "layer inequality", start, None)
}

pub fn run_criterion(id: u8) -> Option<CriterionOutcome> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=10).filter_map(run_criterion).collect()
}
