// Copyright 2026 The otto-dbn Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otto-dbn"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("OTTO_DBN_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

// Small grids keep every invocation well under a second.
const SMALL_TIME: &[&str] = &[
    "--set",
    "grids.tau_drive.count=6",
    "--set",
    "grids.tau_iso.count=5",
];

#[test]
fn unknown_override_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--set", "cycle.nope=1", "point"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown configuration key"));
    let o = run(dir.path(), &["--set", "cycle.pe_c=0.4", "--set", "grids.tau_drive.count=x", "point"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(dir.path(), &["reproduce", "table9"])), 2);
    assert_eq!(code(&run(dir.path(), &["--set", "cycle.tau_drive=-1", "point"])), 2);
}

#[test]
fn point_writes_record_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["point"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let printed: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let w = printed["record"]["mean_work"].as_f64().unwrap();
    let stored = json(&dir.path().join("point.json"));
    assert_eq!(stored["record"]["mean_work"].as_f64().unwrap(), w);
    let meta = json(&dir.path().join("point.meta.json"));
    assert_eq!(meta["command"], "point");
    assert!(meta["git_describe"].is_string());
    assert!(dir.path().join("point.config.toml").exists());
    let paths = std::fs::read_to_string(dir.path().join("point_paths.csv")).unwrap();
    assert_eq!(paths.lines().count(), 33);
}

#[test]
fn degenerate_cycle_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--set", "cycle.gamma_h=0", "--set", "cycle.gamma_c=0", "point"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate fixed point"));
}

#[test]
fn empty_engine_grid_exits_0_unless_strict() {
    let dir = tempfile::tempdir().unwrap();
    // hot populations below the cold ones: nothing on this grid runs as an engine
    let grid = [
        "--regime",
        "positive",
        "--set",
        "grids.pe_c.min=0.3",
        "--set",
        "grids.pe_c.max=0.4",
        "--set",
        "grids.pe_c.count=3",
        "--set",
        "grids.pe_h_positive.min=0.1",
        "--set",
        "grids.pe_h_positive.max=0.2",
        "--set",
        "grids.pe_h_positive.count=3",
        "--set",
        "grids.tau_drive.count=3",
    ];
    let mut args = grid.to_vec();
    args.extend(["reproduce", "table1"]);
    let o = run(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let points = json(&dir.path().join("table1_positive_population_points.json"));
    assert!(points["points"].is_null());
    assert_eq!(points["message"], "no engine points");

    let mut strict = vec!["--strict"];
    strict.extend(args);
    assert_eq!(code(&run(dir.path(), &strict)), 4);
}

#[test]
fn time_scan_csv_has_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_TIME.to_vec();
    args.extend(["--workers", "2", "scan", "time"]);
    let o = run(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("scan_time.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("i,j,pe_c,pe_h,tau_drive"));
    assert_eq!(lines.count(), 30);
    let meta = json(&dir.path().join("scan_time.meta.json"));
    assert_eq!(meta["tables"][0]["rows"], 30);
    assert!(meta["tables"][0]["provenance"]["config_hash"].is_string());
}

#[test]
fn out_flag_beats_environment() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from_env");
    let flag_dir = dir.path().join("from_flag");
    let o = Command::new(env!("CARGO_BIN_EXE_otto-dbn"))
        .env("OTTO_DBN_OUT", &env_dir)
        .args(["point"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(env_dir.join("point.json").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_otto-dbn"))
        .env("OTTO_DBN_OUT", &env_dir)
        .arg("--out")
        .arg(&flag_dir)
        .args(["point"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(flag_dir.join("point.json").exists());
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["validate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = json(&dir.path().join("validate_report.json"));
    assert_eq!(report["passed"], true);

    let o = run(dir.path(), &["validate", "--inject-fault", "flip-up-rate"]);
    assert_eq!(code(&o), 1);
    let report = json(&dir.path().join("validate_report.json"));
    assert_eq!(report["passed"], false);
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"cptp"));
    assert!(failed.contains(&"stationarity"));
}

#[test]
fn fig7_dbn_matches_exact_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["reproduce", "fig7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("fig7_dbn_tpm_summary.json"));
    assert!(s["max_delta_dbn_exact"].as_f64().unwrap() < 1e-10);
    assert_eq!(s["points"], 80);
    let csv = std::fs::read_to_string(dir.path().join("fig7_dbn_tpm.csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("tau_drive,W_exact,W_dbn,W_tpm"));
    assert_eq!(csv.lines().count(), 81);
}

#[test]
fn fig8_bound_maps_are_clean() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL_TIME.to_vec();
    args.extend(["--strict", "reproduce", "fig8"]);
    let o = run(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("fig8_summary.json"));
    assert_eq!(s["violations_hot"], 0);
    assert_eq!(s["violations_cold"], 0);
    assert!(dir.path().join("fig8_contour.csv").exists());
}

#[test]
fn config_file_round_trips_through_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--set", "cycle.tau_drive=35", "point"]);
    assert_eq!(code(&o), 0);
    let cfg = dir.path().join("point.config.toml");
    let again = dir.path().join("again");
    let o = Command::new(env!("CARGO_BIN_EXE_otto-dbn"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&again)
        .arg("point")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = json(&dir.path().join("point.json"));
    let b = json(&again.join("point.json"));
    assert_eq!(a["record"], b["record"]);
    assert_eq!(b["config"]["tau_drive"], 35.0);
}
