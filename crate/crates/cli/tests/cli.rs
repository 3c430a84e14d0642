use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse-gkz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn hasse_kloosterman_p7() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "k.json",
        r#"{"p": 7, "A": [[1], [-1]], "e": [2]}"#,
    );
    let out = run(&["hasse", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["C"], 2);
    assert_eq!(v["H"], serde_json::json!([{"coef": 3, "exps": [2, 0]}]));

    let text = run(&["hasse", "--spec", &spec, "--format", "text"]);
    assert!(String::from_utf8(text.stdout)
        .unwrap()
        .starts_with("H = 3*l1^2\nC = 2\n"));
}

#[test]
fn solutions_example1_p3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "e1.json",
        r#"{"p": 3, "A": [[1,0,0],[0,1,0],[0,0,1],[1,1,-1]], "beta": [1, 1, 0]}"#,
    );
    let out = run(&["solutions", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let basis = v["f_basis"].as_array().unwrap();
    let el = basis
        .iter()
        .find(|e| e["gamma"] == serde_json::json!([1, 1, 0]))
        .unwrap();
    assert_eq!(
        el["poly"],
        serde_json::json!([{"coef": 1, "exps": [0, 0, 1, 1]}, {"coef": 1, "exps": [1, 1, 0, 0]}])
    );
    assert_eq!(el["checks"]["euler"], true);
    assert_eq!(el["checks"]["box"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"p": 7, "A": [[1], [-1]], "m": 2}"#,
    );
    assert_eq!(run(&["hasse", &bad]).status.code(), Some(2));
    let k = write(
        dir.path(),
        "k.json",
        r#"{"p": 7, "A": [[1], [-1]], "e": [2]}"#,
    );
    assert_eq!(run(&["series", &k]).status.code(), Some(2));
    assert_eq!(run(&["solutions", &k]).status.code(), Some(2));
    assert_eq!(
        run(&["hasse", &k, "--cap-override", "nonsense=3"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("absent.json");
    assert_eq!(
        run(&["hasse", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let garbage = write(dir.path(), "garbage.json", "{");
    assert_eq!(run(&["hasse", &garbage]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "q.json",
        r#"{"p": 5, "monomials": [[2, 0], [1, 1], [0, 2]]}"#,
    );
    let one = run(&["oracle", "example3", &spec, "--threads", "1"]);
    let four = run(&["oracle", "example3", &spec, "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);

    let k = write(
        dir.path(),
        "k.json",
        r#"{"p": 5, "a": 2, "A": [[1], [-1]], "e": [3]}"#,
    );
    assert_eq!(run(&["hasse", &k]).stdout, run(&["hasse", &k]).stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "k.json",
        r#"{"p": 5, "a": 2, "A": [[1], [-1]], "e": [3]}"#,
    );
    let target = dir.path().join("report.txt");
    let out = run(&[
        "hasse",
        &spec,
        "--format",
        "text",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let body = fs::read_to_string(target).unwrap();
    assert!(body.contains("H = 4*l1^3 + 2*l1^5*l2^2"));
    assert!(body.contains("case: q = p^2, case 5"));
}

#[test]
fn oracles_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["oracle", "legendre", "--prime", "11"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], true);

    let fam = write(
        dir.path(),
        "f.json",
        r#"{"p": 3, "monomials": [[2, 0], [0, 2]]}"#,
    );
    let out = run(&["oracle", "katz", &fam]);
    assert_eq!(json(&out)["checked"], 1);

    let k = write(
        dir.path(),
        "k.json",
        r#"{"p": 3, "a": 2, "A": [[1], [-1]], "e": [0]}"#,
    );
    assert_eq!(json(&run(&["oracle", "crosscheck", &k]))["passed"], true);

    let s = write(
        dir.path(),
        "s.json",
        r#"{"p": 3, "A": [[1,0,0],[0,1,0],[0,0,1],[1,1,-1]], "u0": [1, 1, 0, 0]}"#,
    );
    let out = run(&["series", &s]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["check"]["congruence"], true);
    assert_eq!(v["series"]["terms"].as_array().unwrap().len(), 2);
}

#[test]
fn corpus_single_criterion() {
    let out = run(&["corpus", "--criterion", "9", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("[PASS] criterion  9"));
    assert_eq!(run(&["corpus", "--criterion", "11"]).status.code(), Some(2));
}
