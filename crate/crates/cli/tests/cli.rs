use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn tropreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = tropreg(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    match v {
        Value::String(t) if t == "-inf" => f64::NEG_INFINITY,
        Value::String(t) if t == "inf" => f64::INFINITY,
        _ => v.as_f64().expect("number"),
    }
}

const A3: &str = "0 0\n1 0\n0 1\n";

#[test]
fn regress_inf_norm() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", A3);
    let y = write(&dir, "y.txt", "1\n1\n1\n");
    let doc = json_ok(&["regress", s(&a), s(&y), "--norm", "inf"]);
    assert_eq!(doc["command"], "regress");
    assert!((f(&doc["result"]["residual"]) - 0.5).abs() < 1e-12);
    for key in ["x", "residual", "status", "iterations", "seed"] {
        assert!(doc["result"].get(key).is_some(), "missing {key}");
    }
    assert!(doc["timing_ms"].is_number());
}

#[test]
fn regress_two_norm_newton() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", A3);
    let y = write(&dir, "y.txt", "1 1 1\n");
    let doc = json_ok(&["regress", s(&a), s(&y)]);
    assert!((f(&doc["result"]["residual"]) - 0.5_f64.sqrt()).abs() < 1e-9);
}

#[test]
fn regress_exact() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", A3);
    let y = write(&dir, "y.txt", "0\n0.5\n0\n");
    let doc = json_ok(&["regress", s(&a), s(&y), "--method", "exact"]);
    let x: Vec<f64> = doc["result"]["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(f)
        .collect();
    assert!(
        (x[0] + 0.25).abs() < 1e-12 && (x[1] + 1.0).abs() < 1e-12,
        "{x:?}"
    );
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "0 abc\n1 0\n");
    let y = write(&dir, "y.txt", "1\n1\n");
    let out = tropreg(&["regress", s(&a), s(&y)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("abc"));

    let ragged = write(&dir, "r.csv", "1,2\n3\n");
    assert_eq!(tropreg(&["sysid", s(&ragged)]).status.code(), Some(2));
    let missing = dir.path().join("none.txt");
    assert_eq!(
        tropreg(&["regress", s(&missing), s(&y)]).status.code(),
        Some(1)
    );
}

#[test]
fn exact_cap_exits_3() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", A3);
    let y = write(&dir, "y.txt", "0\n0.5\n0\n");
    let out = tropreg(&["regress", s(&a), s(&y), "--method", "exact", "--cap", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sysid_recovers_noise_free_scalar_system() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "2\n");
    let orbit = dir.path().join("orbit.csv");
    let out = tropreg(&[
        "simulate",
        s(&m),
        "--x0",
        "0",
        "--steps",
        "10",
        "-o",
        s(&orbit),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&orbit).unwrap().lines().count(), 11);
    let doc = json_ok(&["sysid", s(&orbit), "--sigma", "1"]);
    assert!((f(&doc["result"]["A_hat"][0][0]) - 2.0).abs() < 1e-9);
    assert!(f(&doc["result"]["frob_residual_sq"]) < 1e-12);
    assert!(doc["result"]["loglik"].is_number());
}

#[test]
fn sysid_penalty_writes_neg_inf() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "1 -inf 0\n0 2 -inf\n-inf 1 3\n");
    let orbit = dir.path().join("orbit.csv");
    let out = tropreg(&[
        "simulate",
        s(&m),
        "--x0",
        "0,0,0",
        "--steps",
        "100",
        "--sigma",
        "1",
        "--seed",
        "4",
        "-o",
        s(&orbit),
    ]);
    assert!(out.status.success());
    let doc = json_ok(&["sysid", s(&orbit), "--lambda", "10"]);
    let text = doc["result"]["A_hat"].to_string();
    assert!(text.contains("\"-inf\""), "{text}");
    assert!(doc["result"]["evidence"].is_array());
}

#[test]
fn residual_of_true_matrix() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.txt", "0 1\n-1 0\n");
    let orbit = write(&dir, "o.csv", "0,0\n1,0\n2,0\n");
    let doc = json_ok(&["residual", s(&m), s(&orbit)]);
    assert_eq!(f(&doc["result"]["frob_residual_sq"]), 1.0);
}

#[test]
fn factorize_two_factor_example() {
    let dir = TempDir::new().unwrap();
    let c = write(
        &dir,
        "c.txt",
        "3.59 6.07 12.5 10.2 3.57\n\
         3.42 2.75 10.8 11.0 3.21\n\
         11.8 10.3 15.4 9.74 10.6\n\
         5.91 8.62 11.9 9.7 9.77\n\
         3.98 8.04 14.5 10.2 6.39\n",
    );
    let doc = json_ok(&["factorize", s(&c), "--rank", "2"]);
    let r = &doc["result"];
    assert!(f(&r["residual_sq"]) <= 27.77, "{}", r["residual_sq"]);
    assert_eq!(r["a"].as_array().unwrap().len(), 5);
    assert_eq!(r["b"].as_array().unwrap().len(), 2);
    assert_eq!(r["normalized"], true);
}

#[test]
fn factorize_symmetric() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.txt", "0 1 2\n1 0 3\n2 3 0\n");
    let doc = json_ok(&[
        "factorize",
        s(&c),
        "--rank",
        "3",
        "--symmetric",
        "--zero-diag",
    ]);
    assert!(f(&doc["result"]["residual_sq"]) < 1e-9);
    assert!(doc["result"]["b"].is_null());
}

#[test]
fn paths_on_triangle() {
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "e.txt", "0 1\n1 2\n0 2 5\n");
    let out = tropreg(&["paths", s(&e)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0][2], 2.0);
    assert_eq!(rows[2][0], 2.0);
}

#[test]
fn netreduce_writes_one_feature_row_per_vertex() {
    let n = 62;
    let mut edges = String::new();
    for i in 0..n {
        edges.push_str(&format!("{i} {}\n", (i + 1) % n));
        edges.push_str(&format!("{i} {}\n", (i * 7 + 11) % n));
    }
    let dir = TempDir::new().unwrap();
    let e = write(&dir, "graph.txt", &edges);
    let doc = json_ok(&["netreduce", s(&e), "--rank", "3", "--restarts", "2"]);
    assert_eq!(doc["result"]["vertices"], 62);
    let csv = fs::read_to_string(dir.path().join("graph_features.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 62);
    assert!(rows.iter().all(|r| r.split(',').count() == 5));
}

#[test]
fn polyfit_recovers_exact_coefficients() {
    let dir = TempDir::new().unwrap();
    let pts = write(&dir, "p.csv", "-2\n-1\n0\n1\n2\n");
    let y = write(&dir, "y.txt", "1\n1\n1.5\n2.5\n3.5\n");
    let slopes = write(&dir, "s.txt", "0\n1\n");
    let doc = json_ok(&["polyfit", s(&pts), s(&y), s(&slopes)]);
    assert!(f(&doc["result"]["residual"]) < 1e-9, "{}", doc["result"]);
    let c: Vec<f64> = doc["result"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(f)
        .collect();
    assert!(
        (c[0] - 1.0).abs() < 1e-9 && (c[1] - 1.5).abs() < 1e-9,
        "{c:?}"
    );
}

#[test]
fn verify_subcommands() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", A3);
    let y = write(&dir, "y.txt", "0\n0.5\n0\n");
    let census = json_ok(&["verify", "census", s(&a)]);
    assert_eq!(census["result"]["total"], 7);
    let grid = json_ok(&[
        "verify",
        "grid",
        s(&a),
        s(&y),
        "--lo",
        "-2",
        "--hi",
        "2",
        "--step",
        "0.25",
    ]);
    assert!((f(&grid["result"]["residual"]) - 0.125_f64.sqrt()).abs() < 1e-12);
    let sc = json_ok(&["verify", "setcover", "--family", "1;2;1,2", "--k", "1"]);
    assert_eq!(sc["result"]["agree"], true);
    assert_eq!(sc["result"]["descent"], true);
    let sc = json_ok(&["verify", "setcover", "--family", "1;2;3", "--k", "2"]);
    assert_eq!(sc["result"]["descent"], false);
    let pat = json_ok(&["verify", "pattern", s(&a), "--x", "0,0"]);
    assert_eq!(
        pat["result"]["pattern"],
        serde_json::json!([[0, 1], [0], [1]])
    );
    assert_eq!(pat["result"]["feasible"], true);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = write(
        &dir,
        "a.txt",
        "0 1 -1\n2 0 0.5\n-1 -2 3\n0.3 0.1 0\n1 1 1\n",
    );
    let y = write(&dir, "y.txt", "1\n2\n3\n0\n-1\n");
    let args = ["--seed", "42", "--no-timing", "regress", s(&a), s(&y)];
    let first = tropreg(&args);
    let second = tropreg(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert!(doc["timing_ms"].is_null());
    assert_eq!(doc["result"]["seed"], 42);
}

#[test]
fn written_matrices_round_trip() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.txt",
        "0.1 -inf\n0.30000000000000004 -0.3333333333333333\n",
    );
    let orbit = dir.path().join("o.csv");
    let out = tropreg(&[
        "simulate",
        s(&m),
        "--x0",
        "0.7,-1e-300",
        "--steps",
        "5",
        "--sigma",
        "0.5",
        "-o",
        s(&orbit),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&orbit).unwrap();
    let again: String = text
        .lines()
        .map(|l| {
            let vals: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            let toks: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
            toks.join(",") + "\n"
        })
        .collect();
    assert_eq!(text, again);

    let e = write(&dir, "e.txt", "0 1 0.1\n1 2 0.2\n");
    let d1 = tropreg(&["paths", s(&e)]).stdout;
    let path = write(&dir, "d.txt", std::str::from_utf8(&d1).unwrap());
    let c = json_ok(&["factorize", s(&path), "--rank", "3", "--symmetric"]);
    assert!(f(&c["result"]["residual_sq"]) < 1e-9);
    assert!(String::from_utf8(d1)
        .unwrap()
        .contains("0.30000000000000004"));
}
