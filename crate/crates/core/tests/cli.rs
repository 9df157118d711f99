use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scalar-spectral")).args(args).current_dir(root()).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn golden(name: &str, args: &[&str]) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0));
    let expected = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn gap_report_matches_golden() {
    golden("gap_example3.json", &["--no-timestamp", "gap", "specs/example3.json"]);
}

#[test]
fn reduce_report_matches_golden() {
    golden("reduce_gap_cquarter.json", &["--no-timestamp", "--seed", "7", "reduce", "specs/gap_cquarter.json", "--vector", r#"{"1": 1, "2": 2}"#]);
}

#[test]
fn point_at_zero_for_example3() {
    let out = run(&["classify", "specs/example3.json", "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["classifications"][0]["verdict"], "point");
    assert!(v["timestamp"].is_u64() && v["wall_time_seconds"].is_number());
}

#[test]
fn gap_predicates_agree_for_example3() {
    let v = json(&run(&["gap", "specs/example3.json"]));
    assert_eq!(v["status"], "pass");
    assert_eq!(v["results"]["gap"]["predicates_agree"], true);
    assert_eq!(v["results"]["gap"]["isolated"], false);
}

#[test]
fn shift_residual_at_zero_carries_note() {
    let out = run(&["classify", "specs/example1_shift.json", "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let c = &json(&out)["results"]["classifications"][0];
    assert_eq!(c["verdict"], "residual");
    assert!(c["note"].as_str().unwrap().contains("residual spectrum"));
}

#[test]
fn negative_lambda_is_accepted() {
    let v = json(&run(&["--no-timestamp", "classify", "specs/gap_c1.json", "--lambda", "-1", "--lambda", "2+i"]));
    assert_eq!(v["results"]["classifications"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["--bogus"]).status.code(), Some(64));
    assert_eq!(run(&["classify", "specs/example3.json"]).status.code(), Some(64));
    assert_eq!(run(&["classify", "specs/example3.json", "--lambda", "n+1"]).status.code(), Some(64));
    assert_eq!(run(&["--tolerance", "-1", "gap", "specs/example3.json"]).status.code(), Some(64));
}

#[test]
fn unreadable_or_invalid_spec_exits_65() {
    let missing = run(&["gap", "specs/does_not_exist.json"]);
    assert_eq!(missing.status.code(), Some(65));
    assert_eq!(json(&missing)["status"], "fail");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"model": "diagonal", "prepend": [], "tail": "1 + * n", "p": 2}"#).unwrap();
    assert_eq!(run(&["gap", bad.to_str().unwrap()]).status.code(), Some(65));
}

#[test]
fn help_and_version_exit_0() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify"));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn verify_fails_on_defective_matrix() {
    let out = run(&["--no-timestamp", "verify", "specs/defective_matrix.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "fail");
}

#[test]
fn empty_verify_passes_with_warning() {
    let out = run(&["--no-timestamp", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert!(!v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn verify_is_deterministic_under_a_seed() {
    let args = ["--no-timestamp", "--seed", "3", "verify", "specs/example3.json", "specs/finite_similar.json", "specs/example1_shift.json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
