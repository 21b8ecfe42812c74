use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wedgeqft"))
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn wedgeqft")
}

fn catalogue(name: &str) -> String {
    manifest(&format!("catalogue/{name}.cfg")).display().to_string()
}

#[test]
fn scattering_passes_on_catalogue() {
    for m in ["free", "ising", "shg-b050", "resonance-pi4"] {
        let out = run(&["verify-scattering", "--config", &catalogue(m)]);
        assert_eq!(out.status.code(), Some(0), "{m}: {}", String::from_utf8_lossy(&out.stderr));
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["pass"], true);
        assert_eq!(report["suites"][0]["suite"], "verify-scattering");
        assert_eq!(report["suites"][0]["status"], "pass");
    }
}

#[test]
fn unmatched_zero_fails_with_exit_one() {
    let cfg = manifest("tests/data/corrupt.cfg");
    let out = run(&["verify-scattering", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"][0]["status"], "fail");
    assert!(report["suites"][0]["max_residual"].as_f64().unwrap() > 1e-12);
}

#[test]
fn config_errors_exit_two_with_json_diagnostic() {
    let out = run(&["verify-scattering", "--config", "/nonexistent/model.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "config");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[model]\nepsilon = -1\nfrobnicate = 3\n").unwrap();
    let out = run(&["verify-scattering", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["line"], 3);

    let out = run(&["verify-scattering", "--config", &catalogue("ising"), "--tol-override", "nope=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate", "--config", &catalogue("ising")]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify-scattering", "--config", &catalogue("ising"), "--seed", "xyz"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_override_changes_verdict() {
    // with a tolerance of 1e-300 the round-off of S(θ)·S(−θ) is too large
    let out = run(&["verify-scattering", "--config", &catalogue("shg-b050"), "--tol-override", "relations=1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"][0]["tol"], 1e-300);
}

#[test]
fn csv_output_writes_summary_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify-scattering",
        "--config",
        &catalogue("ising"),
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("suite,status,max_residual,tol"));
    assert!(lines.next().unwrap().starts_with("verify-scattering,pass,"));
    let table = std::fs::read_to_string(dir.path().join("verify-scattering.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("relation,residual,tol"));
    assert_eq!(table.lines().count(), 6);
    let timings: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("timings.json")).unwrap()).unwrap();
    assert!(timings.is_array());
}

#[test]
fn json_out_dir_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify-algebra",
        "--config",
        &catalogue("free"),
        "--seed",
        "0x2a",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 42);
    assert_eq!(report["command"], "verify-algebra");
    assert!(dir.path().join("timings.json").exists());
}

#[test]
fn schema_lists_tables() {
    let out = run(&["--schema"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verify-scattering"));
    assert!(text.contains("partition"));
}

#[test]
fn partition_is_skipped_for_plus_one_models() {
    let out = run(&["partition", "--config", &catalogue("free")]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suites"][0]["status"], "skipped");
}
