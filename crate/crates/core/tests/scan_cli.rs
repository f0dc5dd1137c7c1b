//! Reports and the command-line driver.

use std::process::Command;

use fieldmetro::scan::{self, ReportFormat, ScanConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fieldmetro"))
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("scan{i}.csv"));
        let cfg = ScanConfig {
            output_path: Some(path.clone()),
            ..ScanConfig::default()
        };
        let records = scan::run_scan(&cfg).unwrap();
        scan::emit_report(&records, &cfg).unwrap();
        outputs.push(std::fs::read(path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert_eq!(text.lines().next().unwrap(), scan::CSV_HEADER.join(","));
}

#[test]
fn unwritable_path_is_an_error() {
    let cfg = ScanConfig {
        n_values: vec![24],
        output_path: Some("/nonexistent-dir/x/report.csv".into()),
        ..ScanConfig::default()
    };
    let records = scan::run_scan(&cfg).unwrap();
    assert!(scan::emit_report(&records, &cfg).is_err());
}

#[test]
fn json_has_every_column() {
    let records = scan::run_scan(&ScanConfig {
        n_values: vec![24, 25],
        ..ScanConfig::default()
    })
    .unwrap();
    let v: serde_json::Value = serde_json::from_str(&scan::render_report(&records, ReportFormat::Json).unwrap()).unwrap();
    for col in scan::CSV_HEADER {
        assert!(v[0].get(col).is_some(), "{col}");
    }
    assert!(v[1]["var_ent_sim"].is_null());
}

#[test]
fn cli_scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = bin()
        .args(["scan", "--n-list", "24,48", "--povm", "1,2", "--phi", "1e-4,2e-4,3e-4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("24,9.375000"));
}

#[test]
fn cli_exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["validate"]), Some(0));
    assert_eq!(code(&["scan", "--n-list", "1"]), Some(2));
    assert_eq!(code(&["scan", "--povm", "3"]), Some(2));
    assert_eq!(code(&["scan", "--bogus"]), Some(2));
    assert_eq!(code(&["povm-check", "-n", "10", "--povm", "1", "--deltas", "0.448,0.448,0.448"]), Some(1));
    assert_eq!(code(&["povm-check", "-n", "8"]), Some(0));
    assert_eq!(code(&["scan", "--backend", "dense", "--n-list", "400"]), Some(2));
}

#[test]
fn cli_dense_cap_from_environment() {
    let out = bin()
        .env(fieldmetro::tolerances::DENSE_CAP_ENV, "6")
        .args(["scan", "--backend", "dense", "--n-list", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_qfim_and_fim_summaries() {
    let out = bin().args(["qfim", "-n", "8", "--phi", "1e-7,1e-7,1e-7"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("closed form") && text.contains("finite difference"));
    let out = bin().args(["fim", "-n", "24"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}
