use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn annulus(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annulus")).args(args).arg("--out-dir").arg(out).output().unwrap()
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn optimality_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = annulus(&["optimality", "--n-max", "200", "--tol", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["optimality.csv", "optimality.svg", "summary.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    let s = summary(dir.path());
    assert_eq!(s["command"], "optimality");
    assert_eq!(s["config"]["n_max"], 200);
    let csv = std::fs::read_to_string(dir.path().join("optimality.csv")).unwrap();
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn failing_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = annulus(&["kernel-check", "--tol", "0"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(summary(dir.path())["pass"], false);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "s = 0.25\nn_max = 80\nplot = false\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = annulus(&["optimality", "--config", cfg.to_str().unwrap(), "--n-max", "90", "--tol", "1"], &out_dir);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out_dir);
    assert_eq!(s["config"]["s"], 0.25);
    assert_eq!(s["config"]["n_max"], 90);
    assert!(!out_dir.join("optimality.svg").exists());
}

#[test]
fn bad_configuration_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(annulus(&["optimality", "--s", "1.5"], dir.path()).status.code(), Some(2));
    assert!(summary(dir.path())["error"].is_string());
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "nonsense = 3\n").unwrap();
    let out = annulus(&["robin-stability", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    assert_eq!(annulus(&["optimality"], &blocker.join("x")).status.code(), Some(3));
}
