use hasse_gkz::hasse::{hasse, kloosterman_case_label};
use hasse_gkz::lattice::{relation_kernel_basis, sigma_tau, ASet};
use hasse_gkz::problem::{Caps, ProblemSpec};
use hasse_gkz::solutions::solution_basis;
use hasse_gkz::{Error, GfPoly, LatticeVector};

#[test]
fn json_spec_to_hasse() {
    let spec = ProblemSpec::from_json_str(r#"{"p": 7, "A": [[1], [-1]], "e": [2]}"#).unwrap();
    let r = hasse(&spec).unwrap();
    assert_eq!(r.h.to_string(), "3*l1^2");
    assert_eq!(r.c, Some(2));
    assert_eq!(
        kloosterman_case_label(&spec).as_deref(),
        Some("q = p, e < (p-1)/2")
    );
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["C"], 2);
    assert_eq!(json["H"][0]["coef"], 3);
}

#[test]
fn malformed_specs_are_rejected() {
    assert!(ProblemSpec::from_json_str(r#"{"p": 7, "A": [[1], [-1]], "m": 2}"#).is_err());
    assert!(matches!(
        ProblemSpec::from_json_str(r#"{"p": 8, "A": [[1]]}"#),
        Err(Error::NotPrime(8))
    ));
    assert!(ProblemSpec::from_json_str("not json").is_err());
}

#[test]
fn example1_solution_basis() {
    let a = ASet::from_rows(vec![
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![0, 0, 1],
        vec![1, 1, -1],
    ])
    .unwrap();
    let beta = LatticeVector(vec![1, 1, 0]);
    let b = solution_basis(&a, &beta, 3, &Caps::defaults(3, 1, 4)).unwrap();
    assert!(b.all_ok());
    let f = GfPoly::from_terms(3, 4, [(vec![1, 1, 0, 0], 1), (vec![0, 0, 1, 1], 1)]).unwrap();
    let el = b.f_basis.iter().find(|e| e.gamma == beta).unwrap();
    assert_eq!(el.poly, f);
    assert_eq!(el.weight, 2);
    assert_eq!(relation_kernel_basis(&a).basis, vec![vec![-1, -1, 1, 1]]);
}

#[test]
fn kloosterman_catalog() {
    let a = ASet::from_rows(vec![vec![1], vec![-1]]).unwrap();
    let cat = sigma_tau(&a, &LatticeVector(vec![2]), 5, 40).unwrap();
    let pts: Vec<i64> = cat.sigma_points().map(|g| g.0[0]).collect();
    assert_eq!(pts, vec![-3, 2]);
    assert!(cat.tau.is_empty());
}
