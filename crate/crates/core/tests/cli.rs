use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ymconst"))
}

fn doc(text: &str, suffix: &str) -> NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], input: &str) -> (Output, Option<Value>) {
    let f = doc(input, ".json");
    let mut cmd = bin();
    cmd.args(args).arg(f.path());
    let out = cmd.output().unwrap();
    let json = serde_json::from_slice(&out.stdout).ok();
    (out, json)
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| {
            r.as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .collect()
        })
        .collect()
}

const WORKED: &str = r#"{"n": 3, "J": [[13, 0, 0], [0, 20, 0], [0, 0, 15]]}"#;

#[test]
fn solve_worked_example() {
    let (out, v) = run(&["solve"], WORKED);
    assert_eq!(out.status.code(), Some(0));
    let v = v.unwrap();
    assert_eq!(v["case"], "all-distinct");
    assert_eq!(v["rank"], 3);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    let hit = sols.iter().any(|s| {
        let a = matrix(&s["A"]);
        let want = [[-1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, -3.0]];
        (0..3).all(|i| (0..3).all(|k| (a[i][k] - want[i][k]).abs() < 1e-12))
    });
    assert!(hit);
    let k = v["K"].as_f64().unwrap();
    assert!((k - 6f64.powf(2.0 / 3.0)).abs() < 1e-12);
    assert_eq!(v["tolerances"]["tol"].as_f64(), Some(1e-9));
}

#[test]
fn solve_rank_one_is_empty() {
    let (out, v) = run(&["solve"], r#"{"n": 2, "J": [[1, 0, 0], [0, 0, 0]]}"#);
    assert_eq!(out.status.code(), Some(0));
    let v = v.unwrap();
    assert_eq!(v["solutions"], Value::Array(vec![]));
    assert_eq!(v["case"], "rank-1");
    assert_eq!(v["kind"], "empty");
}

#[test]
fn solve_zero_current_is_family() {
    let (out, v) = run(
        &["solve"],
        r#"{"n": 3, "J": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = v.unwrap();
    assert_eq!(v["kind"], "family");
    assert!(v["family"]["freedom"].as_str().unwrap().contains("Q1"));
    let s = &v["solutions"][0];
    assert_eq!(s["f2coeff"].as_f64(), Some(0.0));
    for f in s["F"].as_array().unwrap() {
        assert!(f["F"]
            .as_array()
            .unwrap()
            .iter()
            .all(|x| x.as_f64() == Some(0.0)));
    }
}

#[test]
fn solve_csv_input_and_output() {
    let f = doc("13,0,0\n0,20,0\n0,0,15\n", ".csv");
    let out = bin()
        .args(["--format", "csv", "solve"])
        .arg(f.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "solution,row,A1,A2,A3,f2coeff,residual");
    assert_eq!(lines.len(), 1 + 2 * 3);
}

#[test]
fn solve_residual_above_tolerance_is_invariant_violation() {
    let (out, _) = run(
        &["--tol", "1e-300", "solve"],
        r#"{"n": 3, "J": [[1, 2, 3], [0, 5, 1], [7, 0, 2]]}"#,
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_examples() {
    let good = r#"{"n": 3, "J": [[13, 0, 0], [0, 20, 0], [0, 0, 15]],
                   "A": [[-1, 0, 0], [0, -2, 0], [0, 0, -3]]}"#;
    let (out, v) = run(&["verify"], good);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v.unwrap()["residual_max"].as_f64(), Some(0.0));

    let bad = r#"{"n": 3, "J": [[13, 0, 0], [0, 20, 0], [0, 0, 15]],
                  "A": [[1, 0, 0], [0, 2, 0], [0, 0, 3]]}"#;
    let (out, v) = run(&["verify"], bad);
    assert_eq!(out.status.code(), Some(1));
    let r = matrix(&v.unwrap()["residual"]);
    assert_eq!(r[1][1], -40.0);

    let zero = r#"{"n": 2, "J": [[0, 0, 0], [0, 0, 0]], "A": [[0, 0, 0], [0, 0, 0]]}"#;
    assert_eq!(run(&["verify"], zero).0.status.code(), Some(0));
}

#[test]
fn verify_without_potential_is_input_error() {
    let (out, _) = run(&["verify"], WORKED);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`A`"));
}

#[test]
fn reported_solutions_verify() {
    let j = "[[1.5, -2, 0.25], [3, 0.5, -1], [0, 2, 2], [-1, 1, 4]]";
    let (out, v) = run(&["solve"], &format!(r#"{{"n": 4, "J": {j}}}"#));
    assert_eq!(out.status.code(), Some(0));
    let v = v.unwrap();
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    for s in sols {
        let input = format!(r#"{{"n": 4, "J": {j}, "A": {}}}"#, s["A"]);
        assert_eq!(run(&["verify"], &input).0.status.code(), Some(0));
    }
}

#[test]
fn classify_summaries() {
    let (out, v) = run(&["classify"], WORKED);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        v.unwrap()["summary"],
        "rank 3, all distinct, 2 solutions expected"
    );

    let equal = r#"{"n": 3, "J": [[0, 5, 0], [0, 0, -5], [5, 0, 0]]}"#;
    let (_, v) = run(&["classify"], equal);
    assert_eq!(
        v.unwrap()["summary"],
        "rank 3, all equal, 1 solution expected"
    );
}

#[test]
fn malformed_inputs_exit_two() {
    for (text, field) in [
        (r#"{"n": 3, "J": [[1, 0, 0]]}"#, "`J`"),
        (r#"{"n": 2, "J": [[1, 0], [0, 1]]}"#, "`J`"),
        (r#"{"J": [[1, 0, 0]]}"#, "`n`"),
        (r#"{"n": 1, "J": [[1, 0, 0]], "A": [[1, 0, "x"]]}"#, "`A`"),
    ] {
        let (out, _) = run(&["solve"], text);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains(field),
            "{text}"
        );
    }
    let (out, _) = run(&["solve"], "{ not json");
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["solve", "/nonexistent/input.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["--tol", "-1", "solve", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_passes() {
    let out = bin()
        .args(["certify", "--trials", "50", "--n", "4", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["roundtrip"]["passes"], 50);
}

#[test]
fn output_is_deterministic() {
    let input = r#"{"n": 5, "J": [[1, 2, 0], [0, 1, 3], [2, 2, 2], [1, 0, 0], [0, 0, 1]]}"#;
    let (a, _) = run(&["solve"], input);
    let (b, _) = run(&["solve"], input);
    assert_eq!(a.stdout, b.stdout);
}
