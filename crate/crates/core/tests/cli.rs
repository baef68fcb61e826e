use std::fs;
use std::path::PathBuf;

use mdbspline::cli::{parse_matrix_csv, run};

fn run_args(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["mdbspline"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("mdbspline-{}-{name}", std::process::id()));
    fs::write(&p, body).unwrap();
    p
}

const EXAMPLE: &str = r#"{"interval": [0, 4], "breakpoints": [1, 2, 3], "degrees": [2, 2, 4, 3], "continuities": [1, 2, 3]}"#;

#[test]
fn validate_space_file() {
    let p = temp("ok.json", EXAMPLE);
    let (code, out, _) = run_args(&["validate", "--space", p.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dimension"], 6);
    assert_eq!(v["c0_dimension"], 11);
}

#[test]
fn malformed_json_reports_position() {
    let p = temp("bad.json", "{\"interval\": [0, 4],\n \"degrees\": [2,, 3]}");
    let (code, _, err) = run_args(&["validate", "--space", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_file_and_unknown_method() {
    assert_eq!(run_args(&["validate", "--space", "/nonexistent/space.json"]).0, 1);
    assert_eq!(run_args(&["matrix", "--preset", "join-demo", "--method", "magic"]).0, 1);
    assert_eq!(run_args(&["experiment", "--preset", "test1", "--methods", "magic"]).0, 1);
}

#[test]
fn matrix_methods_agree_through_csv() {
    let get = |m: &str| {
        let (code, out, err) = run_args(&["matrix", "--preset", "elevation-demo", "--method", m]);
        assert_eq!(code, 0, "{err}");
        parse_matrix_csv(&out).unwrap()
    };
    let rki = get("rki");
    let der = get("derivative");
    assert_eq!(rki.len(), der.len());
    for (a, b) in rki.iter().zip(&der) {
        for (u, v) in a.iter().zip(b) {
            assert!((u - v).abs() < 1e-14);
        }
    }
    // the RDE reference is a different space, so only the shape is shared
    let rde = get("rde");
    assert_eq!(rde.len(), rki.len());
}

#[test]
fn exact_matrix_is_fractions() {
    let (code, out, _) = run_args(&["matrix", "--preset", "join-demo", "--exact"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"], 6);
    assert_eq!(v["entries"][1][2], "3/19");
}

#[test]
fn json_matrix_keeps_digits() {
    let (code, out, _) = run_args(&["matrix", "--preset", "join-demo", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let (_, csv, _) = run_args(&["matrix", "--preset", "join-demo"]);
    let m = parse_matrix_csv(&csv).unwrap();
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(v["matrix"][i][j].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }
}

#[test]
fn spline_evaluation_with_coefficients() {
    // the Greville abscissae reproduce the identity
    let (_, out, _) = run_args(&["eval", "--preset", "join-demo", "--greville"]);
    let xi: Vec<&str> = out.lines().skip(1).collect();
    let c = temp("coeffs.txt", &xi.join("\n"));
    let (code, out, err) = run_args(&["eval", "--preset", "join-demo", "--points", "0.3,2.5,3.9", "--coeffs", c.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    for (line, x) in out.lines().skip(1).zip([0.3, 2.5, 3.9]) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((v - x).abs() < 1e-14, "{line}");
    }
}

#[test]
fn experiment_sequential_equals_parallel() {
    let args = ["experiment", "--preset", "test1,join-demo", "--methods", "greville,derivative,rde", "--oracle"];
    let (c1, par, _) = run_args(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let (c2, seq, _) = run_args(&seq_args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(par, seq);
    assert!(par.starts_with("preset,method,rows,cols,matrix_error"));
}

#[test]
fn unknown_keys_are_rejected() {
    let p = temp("typo.json", r#"{"interval": [0, 1], "degrees": [3], "continuity": []}"#);
    let (code, _, err) = run_args(&["validate", "--space", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("continuity"), "{err}");
}
