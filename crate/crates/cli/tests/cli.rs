//! Exit codes and output layout of the `karman` binary.

use std::path::Path;
use std::process::{Command, Output};

fn karman(sub: &str, config: &str, dir: &Path) -> Output {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_karman"))
        .args([sub, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

#[test]
fn successful_run_writes_csv_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = karman("point-speed", "", dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/point_speed.csv")).unwrap();
    assert!(csv.starts_with("method,K,re,im,error_bound\n"));
    let resolved = std::fs::read_to_string(dir.path().join("out/point-speed.config.toml")).unwrap();
    assert!(resolved.contains("[solve]") && resolved.contains("modes = 32"));
}

#[test]
fn unknown_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = karman("point-speed", "[geometry]\nwidth = 2.0\n", dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("width"));
}

#[test]
fn invalid_geometry_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = karman("point-speed", "[geometry]\nh = 0.0\n", dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_with_assertion_code_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = karman("point-speed", "[speed]\nagreement_tol = 1e-30\n", dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("closed_form_agreement"));
}

#[test]
fn stalled_continuation_exits_with_convergence_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = karman("solve-street", "[solve]\nmodes = 8\ngrid = 64\nmax_iter = 1\nnewton_tol = 1e-30\n", dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn golden_record_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let base = "[solve]\nmodes = 8\ngrid = 64\neps = 0.01\n";
    assert_eq!(karman("solve-street", base, dir.path()).status.code(), Some(0));
    let golden = dir.path().join("golden.txt");
    std::fs::copy(dir.path().join("out/solution.txt"), &golden).unwrap();
    let cfg = format!("{base}golden = \"{}\"\n", golden.display());
    let out = karman("solve-street", &cfg, dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS golden_record_match"));
}
