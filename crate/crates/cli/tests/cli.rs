use std::path::PathBuf;

use qchlab_cli::{run, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("qchlab").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = call(args);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}")))
}

#[test]
fn axioms_on_bell_pass() {
    let (code, r) = report(&["axioms", &fixture("bell.json")]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(r["command"], "axioms");
    assert_eq!(r["pass"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["residual"].as_f64().unwrap() < 1e-8);
        assert!(c.get("tolerance").is_some() && c.get("name").is_some());
    }
    for s in ["validate", "extension", "spacelike_commutativity", "composition", "pair_reductions"] {
        assert_eq!(r["data"]["sections"][s]["pass"], true, "{s}");
    }
}

#[test]
fn algebra_blocks_on_single_edge() {
    let (code, r) = report(&["algebra", "--blocks", &fixture("single_edge.json")]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(r["data"]["dim"], 4);
    assert_eq!(r["data"]["blocks"], serde_json::json!([[2, 1]]));
    let (_, r) = report(&["algebra", &fixture("single_edge.json")]);
    assert!(r["data"].get("blocks").is_none());
}

#[test]
fn missing_file_is_usage_error() {
    let (code, out, err) = call(&["validate", "does_not_exist.json"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(out.is_empty());
    assert!(err.contains("does_not_exist.json"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"graph\": {\"vertices\": [}\n}").unwrap();
    let (code, _, err) = call(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("E_PARSE") && err.contains("line 2"), "{err}");
}

#[test]
fn dimension_mismatch_names_the_edge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mismatch.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture("single_edge.json")).unwrap()).unwrap();
    v["graph"]["vertices"][1]["dim"] = 2.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, _, err) = call(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_ERROR, "{err}");
    assert!(err.contains("xy"), "{err}");
}

#[test]
fn failing_checks_exit_one_with_residuals() {
    let (code, r) = report(&["ck", &fixture("ck_scaled.json")]);
    assert_eq!(code, EXIT_FAIL);
    assert_eq!(r["pass"], false);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failed.is_empty());
    for c in failed {
        assert!(c["residual"].as_f64().unwrap() >= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn ck_converts_single_edge() {
    let (code, r) = report(&["ck", &fixture("ck_single_edge.json")]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(r["data"]["channels"]["xy"]["kraus"], 1);
    assert_eq!(r["data"]["channels"]["xy"]["unital"], true);
}

#[test]
fn circuit_writes_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bell.json");
    let (code, r) = report(&["circuit", &fixture("bell_circuit.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(r["data"]["qubits"], 2);
    assert_eq!(r["data"]["depth"], 2);
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(written, std::fs::read_to_string(fixture("bell.json")).unwrap());
    let (code, _) = report(&["validate", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_PASS);
}

#[test]
fn invariance_records_seed_and_trials() {
    let (code, r) = report(&["invariance", "--trials", "4", "--seed", "3", &fixture("dephasing_edge.json")]);
    assert_eq!(code, EXIT_PASS);
    assert_eq!(r["data"]["trials"], 4);
    assert_eq!(r["data"]["seed"], 3);
    assert_eq!(r["checks"].as_array().unwrap().len(), 8);
}

#[test]
fn floats_have_seventeen_significant_digits() {
    let (_, out, _) = call(&["validate", &fixture("single_edge.json")]);
    assert!(out.contains("\"residual\": 0.0000000000000000e0"), "{out}");
    assert!(out.contains("\"tolerance\": 1.0000000000000000e-10"));
}

#[test]
fn text_mode_lists_checks() {
    let (code, out, _) = call(&["--text", "ck", &fixture("ck_scaled.json")]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.lines().any(|l| l.starts_with("FAIL ck/xy/initial residual=3.000e0")));
    assert!(out.trim_end().ends_with("failed"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(call(&["--tol-eq=0", "validate", &fixture("bell.json")]).0, EXIT_ERROR);
    assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
    assert_eq!(call(&[]).0, EXIT_ERROR);
    assert_eq!(call(&["--help"]).0, EXIT_PASS);
}

#[test]
fn loosened_tolerance_changes_outcome() {
    let (code, _) = report(&["--tol-eq=10", "ck", &fixture("ck_scaled.json")]);
    assert_eq!(code, EXIT_PASS);
}
