use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn mpade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpade")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

/// Parses `l,k,m,coefficient` rows.
fn rows(text: &str) -> Vec<(usize, usize, usize, f64)> {
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect()
}

#[test]
fn moments_of_the_unit_disk() {
    let o = mpade(&["moments", "--example", "ex0", "--L", "6", "--format", "csv"]);
    assert!(o.status.success());
    for (l, k, _, c) in rows(&stdout(&o)) {
        if l % 2 == 1 || k > 0 {
            assert_eq!(c, 0.0, "l = {l}, k = {k}");
        } else {
            // ∫_disk |x|^l Y_0 dx with Y_0 = (2π)^{-1/2}.
            let exact = (2.0 * PI).sqrt() / (l as f64 + 2.0);
            assert!((c - exact).abs() < 1e-14 * exact);
        }
    }
}

#[test]
fn moments_of_the_segment_follow_chebyshev_expansion() {
    // sin((l+1)t) / ((l+1) sin t) = (1/(l+1)) Σ_{k ≡ l (2), k ≤ l} ε_k cos(kt), so against
    // Y_0 = (2π)^{-1/2} and Y_{k,1} = cos(kt)/√π the coefficients of f_l are
    // 1/(√(2π)(l+1)) and 1/(√π(l+1)).
    let o = mpade(&["moments", "--example", "prop6-lebesgue", "--L", "4", "--format", "csv"]);
    assert!(o.status.success());
    let got = rows(&stdout(&o));
    assert!(!got.is_empty());
    for (l, k, m, c) in got {
        let lf = (l + 1) as f64;
        let exact = match (k, m) {
            (0, _) => 1.0 / ((2.0 * PI).sqrt() * lf),
            (_, 1) => 1.0 / (PI.sqrt() * lf),
            _ => 0.0,
        };
        assert!((c - exact).abs() < 1e-13, "l = {l}, k = {k}, m = {m}: {c} vs {exact}");
    }
}

#[test]
fn empty_measure_file_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "").unwrap();
    let o = mpade(&["moments", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn unknown_field_reports_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"variant": "discrete", "d": 2, "R": 1.0, "atoms": [], "extra": 1}"#).unwrap();
    let o = mpade(&["moments", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn measure_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mu.json");
    std::fs::write(&path, r#"{"variant": "discrete", "d": 2, "R": 1.0, "atoms": [[[0.5, 0.0], 2.0]]}"#).unwrap();
    let out = dir.path().join("rows.csv");
    let o = mpade(&["moments", "--input", path.to_str().unwrap(), "--L", "4", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    // c_{0,0,1} = weight · Y_0.
    let r = rows(&text);
    assert!((r[0].3 - 2.0 / (2.0 * PI).sqrt()).abs() < 1e-14);
}

#[test]
fn coefficient_stream_input() {
    let dir = tempfile::tempdir().unwrap();
    let rows_path = dir.path().join("rows.csv");
    let o = mpade(&["moments", "--example", "rotation-invariant", "--L", "16", "--format", "csv", "--out", rows_path.to_str().unwrap()]);
    assert!(o.status.success());
    let args = ["rationality", "--input", rows_path.to_str().unwrap(), "--n", "8", "--L", "16"];
    assert_eq!(mpade(&args).status.code(), Some(2), "stream without --dim/--radius");
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--dim", "2", "--radius", "1.2"]);
    let o = mpade(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["rational"], true);
    assert_eq!(v["detected_degree"], 6);
}

#[test]
fn hankel_verdicts() {
    let o = mpade(&["hankel", "--example", "ex1-degenerate", "--n", "2"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["positive"], false);
    let o = mpade(&["hankel", "--example", "polar-positive", "--n", "3"]);
    assert_eq!(json(&o)["positive"], true);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(&path, r#"{"variant": "discrete", "d": 2, "R": 1.0, "atoms": []}"#).unwrap();
    let o = mpade(&["hankel", "--input", path.to_str().unwrap(), "--n", "2"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["positive"], false);
}

#[test]
fn pade_reports_degenerate_direction() {
    let o = mpade(&["pade", "--example", "ex1-degenerate", "--n", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    let e1 = v["directions"].as_array().unwrap().iter().find(|d| d["theta"][0] == 1.0).unwrap();
    assert!(e1["error"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn cubature_exit_codes() {
    let o = mpade(&["cubature", "--example", "polar-positive", "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["exactness"]["max_rel_error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["positivity"]["passed"], true);
    assert!(!v["rule"]["points"].as_array().unwrap().is_empty());
    let o = mpade(&["cubature", "--example", "ex1-degenerate", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mpade(&["cubature", "--example", "polar-positive", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_examples() {
    for name in ["ex0", "prop6-lebesgue", "ex1-degenerate", "rotation-invariant"] {
        let o = mpade(&["reproduce", name]);
        assert!(o.status.success(), "{name}: {}", stdout(&o));
    }
    let o = mpade(&["reproduce", "polar-positive", "--n", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = mpade(&["reproduce", "no-such-example"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage"));
}

#[test]
fn usage_errors() {
    assert_eq!(mpade(&["moments"]).status.code(), Some(2));
    assert_eq!(mpade(&["moments", "--example", "ex0", "--n", "3", "--L", "4"]).status.code(), Some(2));
    assert_eq!(mpade(&["rationality", "--example", "ex0", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(mpade(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mpade(&["moments", "--input", "/nonexistent/mu.json"]).status.code(), Some(2));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["cubature", "--example", "polar-positive", "--n", "2", "--seed", "11"];
    let a = mpade(&args);
    let b = mpade(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rule.csv");
    let o = mpade(&["cubature", "--example", "polar-positive", "--n", "2", "--format", "csv", "--out", p.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(Path::new(&p)).unwrap();
    assert!(text.starts_with("x1,x2,weight\n"));
}
