use std::path::{Path, PathBuf};
use std::process::Command;

use cpdil::cli::{run_from, Outcome};
use serde_json::Value;

/// Golden reports are compared exactly except for floats, which may move in
/// the last few bits between builds.
const GOLDEN_FLOAT_TOL: f64 = 1e-12;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Outcome {
    run_from(std::iter::once("cpdil").chain(args.iter().copied()))
}

fn run_on(args: &[&str], file: &str) -> Outcome {
    let path = fixture(file);
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    run(&all)
}

fn report(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", out.stdout))
}

fn assert_close(actual: &Value, expected: &Value, at: &str) {
    match (actual, expected) {
        (Value::Number(a), Value::Number(b)) if a.is_f64() || b.is_f64() => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= GOLDEN_FLOAT_TOL * b.abs().max(1.0), "{at}: {a} vs golden {b}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{at}: array length");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_close(x, y, &format!("{at}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            let keys_a: Vec<_> = a.keys().collect();
            let keys_b: Vec<_> = b.keys().collect();
            assert_eq!(keys_a, keys_b, "{at}: keys");
            for (k, v) in a {
                assert_close(v, &b[k], &format!("{at}.{k}"));
            }
        }
        _ => assert_eq!(actual, expected, "{at}"),
    }
}

fn check_golden(args: &[&str], input: &str, golden: &str, code: i32) {
    let out = run_on(args, input);
    assert_eq!(out.code, code, "stderr: {}", out.stderr);
    let text = std::fs::read_to_string(fixture(&format!("golden/{golden}"))).unwrap();
    let expected: Value = serde_json::from_str(&text).unwrap();
    assert_close(&report(&out), &expected, golden);
}

#[test]
fn golden_reports() {
    check_golden(&["strong-commute"], "stochastic_3x3_pair.json", "strong_commute_stochastic_3x3.json", 1);
    check_golden(&["classify"], "identity_2.json", "classify_identity_2.json", 0);
    check_golden(&["dilate", "--horizon", "2", "2", "--margin", "1", "1"], "zx_pair.json", "dilate_zx_2_2.json", 0);
    check_golden(
        &["dilate", "--horizon", "2", "0", "--margin", "1", "0"],
        "reset_pair.json",
        "dilate_reset_2_0.json",
        0,
    );
    check_golden(&["prodsys", "verify", "--horizon", "3", "3"], "pauli_pair.json", "prodsys_pauli_3_3.json", 0);
    check_golden(&["commute"], "pauli_pair.json", "commute_pauli.json", 0);
    check_golden(&["strong-commute"], "pauli_pair.json", "strong_commute_pauli.json", 0);
}

#[test]
fn stochastic_counterexample_reports_witness() {
    let out = run_on(&["strong-commute"], "stochastic_3x3_pair.json");
    assert_eq!(out.code, 1);
    let r = report(&out);
    assert_eq!(r["kind"], "stochastic");
    assert_eq!(r["commute"], true);
    assert_eq!(r["strongly_commute"], false);
    let w = &r["card"]["witnesses"][0];
    assert_eq!((w["i"].as_u64(), w["k"].as_u64()), (Some(0), Some(0)));
    assert_eq!((w["count_qp"].as_u64(), w["count_pq"].as_u64()), (Some(2), Some(3)));
}

#[test]
fn classify_identity_is_unital_cp() {
    let out = run_on(&["classify"], "identity_2.json");
    assert_eq!(out.code, 0);
    let r = report(&out);
    assert_eq!(r["is_cp"], true);
    assert_eq!(r["is_unital"], true);
}

#[test]
fn dilate_zx_pair_has_two_dimensional_k() {
    let out = run_on(&["dilate", "--horizon", "2", "2", "--margin", "1", "1"], "zx_pair.json");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let r = report(&out);
    assert_eq!(r["dimK"], 2);
    assert_eq!(r["pass"], true);
}

#[test]
fn every_numeric_claim_carries_its_tolerance() {
    let out = run_on(&["--tol", "1e-7", "dilate", "--horizon", "2", "2"], "zx_pair.json");
    let r = report(&out);
    for (name, check) in r["residuals"].as_object().unwrap() {
        if !check.is_null() {
            assert!(check["tol"].is_number(), "residual {name} lacks a tolerance");
        }
    }
    assert_eq!(r["residuals"]["isometry"]["tol"], 1e-7);
    assert!(r["gram_min_eig"]["tol"].is_number());
    assert!(r["minimality"]["tol"].is_number());
}

#[test]
fn reports_are_byte_stable() {
    for (args, file) in [
        (vec!["dilate", "--horizon", "2", "1"], "pauli_pair.json"),
        (vec!["strong-commute"], "stochastic_3x3_pair.json"),
        (vec!["--format", "text", "prodsys", "verify"], "reset_pair.json"),
    ] {
        let a = run_on(&args, file);
        let b = run_on(&args, file);
        assert_eq!(a, b);
    }
}

#[test]
fn malformed_input_names_the_field() {
    let out = run_on(&["strong-commute"], "malformed.json");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("phi.kraus[0][1][1]"), "{}", out.stderr);

    let out = run_on(&["classify"], "truncated.json");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);
}

#[test]
fn invalid_configuration_exits_two() {
    let out = run_on(&["--tol", "0", "classify"], "identity_2.json");
    assert_eq!(out.code, 2);
    let out = run_on(&["dilate", "--horizon", "1", "1", "--margin", "2", "0"], "zx_pair.json");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("margin"));
    let out = run(&["no-such-command"]);
    assert_eq!(out.code, 2);
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("dilate"));
}

#[test]
fn two_map_files_and_mixed_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.json");
    let x = dir.path().join("x.json");
    let p = dir.path().join("p.json");
    std::fs::write(&z, r#"{"dim": 2, "kraus": [[[1, 0], [0, -1]]]}"#).unwrap();
    std::fs::write(&x, r#"{"dim": 2, "kraus": [[[0, 1], [1, 0]]]}"#).unwrap();
    std::fs::write(&p, "[[0.5, 0.5], [0.5, 0.5]]").unwrap();
    let (z, x, p) = (z.to_str().unwrap(), x.to_str().unwrap(), p.to_str().unwrap());

    let out = run(&["commute", z, x]);
    assert_eq!(out.code, 0);
    let out = run(&["commute", z, p]);
    assert_eq!(out.code, 2);
    let out = run(&["stochastic", "--irreducible", p]);
    assert_eq!(out.code, 0);
}

#[test]
fn non_commuting_pair_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    std::fs::write(
        &path,
        r#"{"theta": {"dim": 2, "kraus": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
            "phi": {"dim": 2, "kraus": [[[0, 1], [1, 0]]]}}"#,
    )
    .unwrap();
    let path = path.to_str().unwrap();
    for cmd in [vec!["commute"], vec!["strong-commute"], vec!["prodsys", "verify"], vec!["dilate"]] {
        let mut args = cmd.clone();
        args.push(path);
        assert_eq!(run(&args).code, 1, "{cmd:?}");
    }
}

#[test]
fn supplied_certificate_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    let pair = r#""theta": {"dim": 2, "kraus": [[[1, 0], [0, -1]]]}, "phi": {"dim": 2, "kraus": [[[0, 1], [1, 0]]]}"#;
    // Z X = −X Z, so the 1 × 1 certificate is −1.
    std::fs::write(&good, format!(r#"{{{pair}, "certificate": [[-1]]}}"#)).unwrap();
    std::fs::write(&bad, format!(r#"{{{pair}, "certificate": [[1]]}}"#)).unwrap();
    let out = run(&["strong-commute", good.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert_eq!(report(&out)["certificate_source"], "supplied");
    let out = run(&["strong-commute", bad.to_str().unwrap()]);
    assert_eq!(out.code, 1);
    let out = run(&["prodsys", "verify", bad.to_str().unwrap()]);
    assert_eq!(out.code, 2);
}

#[test]
fn binary_honours_env_tolerance_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cpdil");
    let out = Command::new(bin)
        .env("CPDIL_TOL", "1e-6")
        .args(["classify", fixture("identity_2.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["tol"], 1e-6);

    let out = Command::new(bin)
        .args(["strong-commute", fixture("stochastic_3x3_pair.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(bin).env("CPDIL_TOL", "-1").args(["classify", "x.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
