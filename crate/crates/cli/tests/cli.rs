//! The binary's exit codes, error stream and output files.

use std::path::Path;
use std::process::{Command, Output};

use fermilearn::fermion::fixtures::complex_necessity_amplitudes;
use fermilearn::fermion::FermionState;
use serde_json::Value;

fn fermilearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermilearn"))
        .args(args)
        .env_remove("FERMILEARN_CAPACITY")
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

#[test]
fn fixtures_mode_succeeds() {
    let out = fermilearn(&["--mode", "fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["format_version"], 1);
    assert_eq!(report["all_satisfied"], true);
    assert!(report["timestamp"].is_u64());
}

#[test]
fn invalid_epsilon_is_a_config_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = fermilearn(&[
        "--mode",
        "learn-fermion",
        "--m",
        "6",
        "--n",
        "2",
        "--epsilon",
        "1.5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "config");
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn epsilon_and_gamma_are_exclusive() {
    let out = fermilearn(&["--mode", "learn-fermion", "--m", "4", "--n", "2", "--epsilon", "0.2", "--gamma", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "config");
}

#[test]
fn missing_parameters_are_reported() {
    for args in [
        vec!["--mode", "learn-fermion", "--n", "2", "--epsilon", "0.2"],
        vec!["--mode", "learn-fermion", "--m", "3", "--n", "4", "--epsilon", "0.2"],
        vec!["--mode", "learn-density", "--epsilon", "0.2"],
        vec!["--mode", "sample", "--m", "4"],
        vec!["--mode", "verify", "--trials", "0"],
        vec!["--mode", "bogus"],
    ] {
        let out = fermilearn(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr_json(&out)["error"]["message"].is_string());
    }
}

#[test]
fn capacity_limit_from_flag_and_environment() {
    let args = ["--mode", "learn-fermion", "--m", "10", "--n", "5", "--gamma", "0.1", "--capacity", "100"];
    let out = fermilearn(&args);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"]["kind"], "capacity");

    let out = Command::new(env!("CARGO_BIN_EXE_fermilearn"))
        .args(&args[..8])
        .env("FERMILEARN_CAPACITY", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sample_mode_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    let out = fermilearn(&[
        "--mode",
        "sample",
        "--m",
        "5",
        "--n",
        "2",
        "--samples",
        "50",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# format_version=1"));
    assert_eq!(lines.next(), Some("sample,bitstring"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 50);
    for row in rows {
        let bits = row.split(',').nth(1).unwrap();
        assert_eq!(bits.len(), 5);
        assert_eq!(bits.chars().filter(|&c| c == '1').count(), 2);
    }
}

#[test]
fn state_file_drives_learning() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let s = FermionState::from_amplitudes(&complex_necessity_amplitudes()).unwrap();
    std::fs::write(&state, s.to_json_string()).unwrap();
    let report = dir.path().join("report.json");
    let out = fermilearn(&[
        "--mode",
        "learn-fermion",
        "--gamma",
        "0.05",
        "--seed",
        "5",
        "--state-file",
        state.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!((r["m"].as_u64(), r["n"].as_u64()), (Some(4), Some(2)));
    let t = &r["trials"][0];
    assert!(t["gamma_observed"].as_f64().unwrap() <= 0.05);
    assert_eq!(t["theorem_check"]["satisfied"], true);
    assert!(t["tv_raw"].is_f64() && t["tv_projected"].is_f64());
}

#[test]
fn malformed_state_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    // Columns are not orthonormal.
    std::fs::write(&state, r#"{"rows":2,"cols":1,"data":[[1.0,0.0],[1.0,0.0]],"m":2,"n":1}"#).unwrap();
    let out = fermilearn(&["--mode", "sample", "--state-file", state.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&state.with_extension("partial")).exists());
}

#[test]
fn density_mode_reports_trace_bound() {
    let out = fermilearn(&["--mode", "learn-density", "--d", "3", "--gamma", "0.05", "--seed", "1", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["bound_satisfied_all"], true);
    assert_eq!(r["trials"].as_array().unwrap().len(), 2);
}
