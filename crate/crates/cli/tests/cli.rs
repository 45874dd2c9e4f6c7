use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bisqueeze"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn column(path: &Path, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let idx = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name} in {}", path.display()));
    reader.records().map(|r| r.unwrap()[idx].to_string()).collect()
}

fn floats(path: &Path, name: &str) -> Vec<f64> {
    column(path, name).iter().map(|s| s.parse().unwrap()).collect()
}

const RANK_ONE_FULL: &str = r#"{
  "model": { "name": "rank-one" },
  "dim": 64,
  "tasks": [
    { "task": "validate", "nmax": 20 },
    { "task": "states", "r": 0.3, "theta": 0.4 },
    { "task": "radius" },
    { "task": "dynamics", "lambda": 0.1, "identification_lambda": 0.15 },
    { "task": "identity", "r": 0.3 }
  ]
}"#;

#[test]
fn identity_validate_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"model": {"name": "identity"}, "tasks": [{"task": "validate"}]}"#);
    let out_dir = dir.path().join("out");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out_dir.join("report.json"));
    assert_eq!(report["status"], "pass");
    assert_eq!(report["tasks"][0]["task"], "validate");
    assert!(report["tasks"][0]["identity"].as_str().unwrap().contains("delta_nm"));
    for v in floats(&out_dir.join("00_validate.csv"), "value") {
        assert!(v <= 1e-12);
    }
}

#[test]
fn every_task_reports_an_identity() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", RANK_ONE_FULL);
    let out_dir = dir.path().join("out");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report = json(&out_dir.join("report.json"));
    let tasks = report["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 5);
    for (k, name) in ["validate", "states", "radius", "dynamics", "identity"].iter().enumerate() {
        assert_eq!(tasks[k]["task"], *name);
        assert!(!tasks[k]["identity"].as_str().unwrap().is_empty());
        let per_task = json(&out_dir.join(format!("{k:02}_{name}.json")));
        assert_eq!(per_task["identity"], tasks[k]["identity"]);
        for check in per_task["checks"].as_array().unwrap() {
            assert!(!check["identity"].as_str().unwrap().is_empty());
        }
    }
    let identity = floats(&out_dir.join("04_identity.csv"), "residual");
    assert_eq!(identity.len(), 3);
    assert!(identity.iter().all(|r| *r <= 1e-5));
}

#[test]
fn swanson_radius_report_has_three_radii() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"model": {"name": "swanson", "nu": 0.3}, "tasks": [{"task": "radius"}]}"#);
    let out_dir = dir.path().join("out");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rep = json(&out_dir.join("00_radius.json"));
    let radii = &rep["diagnostics"]["report"];
    // mpmath: atanh(1/q) and atanh(1/q^2) with q = x + sqrt(x^2 - 1), x = 1/cos 0.6
    assert!((radii["rho_theoretical"].as_f64().unwrap() - 0.586_663_203_645_584_7).abs() < 1e-12);
    assert!((radii["rho_displayed_form"].as_f64().unwrap() - 0.285_781_269_291_670_1).abs() < 1e-12);
    assert!((radii["rho_empirical"].as_f64().unwrap() - 0.586_663_2).abs() < 1e-6);
    assert_eq!(rep["diagnostics"]["agreement"], "theorem");
}

#[test]
fn unknown_keys_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    for (body, key) in [
        (r#"{"model": {"name": "identity"}, "tasks": [{"task": "validate"}], "tolerance": {}}"#, "tolerance"),
        (r#"{"model": {"name": "identity"}, "tasks": [{"task": "validate", "n": 3}]}"#, "`n`"),
        (r#"{"model": {"name": "qutrit"}, "tasks": [{"task": "validate"}]}"#, "qutrit"),
        (r#"{"model": {"name": "identity"}, "tasks": [{"task": "spectrum"}]}"#, "spectrum"),
    ] {
        let cfg = write_config(dir.path(), "c.json", body);
        let out = run(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(code(&out), 1);
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{err}");
    }
    assert_eq!(code(&run(&["launch"])), 1);
    assert_eq!(code(&run(&["run"])), 1);
}

#[test]
fn flagged_tasks_soft_fail() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"model": {"name": "swanson", "nu": 0.3, "n_max": 40, "grid_nodes": 400}, "dim": 32,
            "tasks": [{"task": "states", "r": 0.5}]}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out_dir.join("report.json"))["tasks"][0]["status"], "flagged");
}

#[test]
fn numeric_failure_is_task_level() {
    let dir = TempDir::new().unwrap();
    // the Swanson model has no bounded T, so the identity task cannot run
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"model": {"name": "swanson", "nu": 0.3, "n_max": 64, "grid_nodes": 400},
            "tasks": [{"task": "validate", "nmax": 8}, {"task": "identity"}]}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report = json(&out_dir.join("report.json"));
    assert_eq!(report["tasks"][0]["status"], "pass");
    assert_eq!(report["tasks"][1]["status"], "fail");
    assert!(report["tasks"][1]["error"].as_str().unwrap().contains("identity resolution"));
    assert!(!report["tasks"][1]["identity"].as_str().unwrap().is_empty());
}

#[test]
fn dim_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"model": {"name": "rank-one"}, "tasks": [{"task": "states", "r": 0.2}]}"#);
    let out_dir = dir.path().join("out");
    let out = run(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--dim", "32"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out_dir.join("report.json"))["dim"], 32);
    assert_eq!(column(&out_dir.join("00_states.csv"), "n").len(), 32);
}

#[test]
fn scan_nu_radius_decreases() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"model": {"name": "swanson", "nu": 0.3, "n_max": 8, "grid_nodes": 64}, "dim": 8, "tasks": [{"task": "radius"}]}"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&["scan", cfg.to_str().unwrap(), "--axis", "nu", "--values", "0.1:0.7:7", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rho = floats(&out_dir.join("scan_nu.csv"), "00_radius.rho_empirical");
    assert_eq!(rho.len(), 7);
    assert!(rho.windows(2).all(|w| w[1] < w[0]), "{rho:?}");
    assert!(rho[6] < 0.1);
}

#[test]
fn scan_t_follows_sinh_squared() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"model": {"name": "rank-one"}, "tasks": [{"task": "dynamics", "lambda": 0.1}]}"#);
    let out_dir = dir.path().join("out");
    let out = run(&["scan", cfg.to_str().unwrap(), "--axis", "t", "--values", "0:2:11", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let path = out_dir.join("scan_t.csv");
    let t = floats(&path, "t");
    let element = floats(&path, "00_dynamics.psi_phi");
    for (t, e) in t.iter().zip(&element) {
        assert!((e - (0.2 * t).sinh().powi(2)).abs() < 1e-8);
    }
}

#[test]
fn scan_r_pairing_is_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"model": {"name": "rank-one"}, "tasks": [{"task": "states", "r": 0.1}]}"#);
    let out_dir = dir.path().join("out");
    let out = run(&["scan", cfg.to_str().unwrap(), "--axis", "r", "--values", "0.1,0.2,0.3,0.4,0.5,0.6", "--out", out_dir.to_str().unwrap()]);
    // tanh 0.6 is past the tail cut-off at dim 64, so the last point is flagged
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stdout));
    let path = out_dir.join("scan_r.csv");
    let status = column(&path, "00_states.status");
    assert_eq!(status, ["pass", "pass", "pass", "pass", "pass", "flagged"]);
    for (re, im) in floats(&path, "00_states.pairing_re").iter().zip(floats(&path, "00_states.pairing_im")) {
        assert!((re - 1.0).abs() < 1e-7 && im.abs() < 1e-7);
    }
}

#[test]
fn scan_axis_mismatch_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"model": {"name": "identity"}, "tasks": [{"task": "radius"}]}"#);
    let out = run(&["scan", cfg.to_str().unwrap(), "--axis", "lambda", "--values", "0.1", "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}

fn csv_bodies(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "c.json", RANK_ONE_FULL);
    let mut bodies = Vec::new();
    for (k, extra) in [None, None, Some("--parallel")].into_iter().enumerate() {
        let out_dir = dir.path().join(format!("out{k}"));
        let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(code(&run(&args)), 0);
        bodies.push(csv_bodies(&out_dir));
    }
    assert_eq!(bodies[0].len(), 5);
    assert_eq!(bodies[0], bodies[1]);
    assert_eq!(bodies[0], bodies[2]);
}
