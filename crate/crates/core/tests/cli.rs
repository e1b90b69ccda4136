//! The `mfcd` binary end to end: outputs, reproducibility and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use mfcd::rotframe::AnnealScheduleExport;
use serde_json::{json, Value};
use tempfile::TempDir;

fn run(dir: &Path, sub: &str, config: &Value, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{sub}.json"));
    std::fs::write(&cfg, config.to_string()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_mfcd"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn summary(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

fn small_batch(topology: &str) -> Value {
    json!({
        "steps": 500,
        "batch": { "n_sites": 4, "topology": topology, "j_seeds": [0, 1], "h_seeds": [1000, 1001, 1002] }
    })
}

#[test]
fn bloch_is_bitwise_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = json!({ "steps": 1000 });
    let (oa, ob) = (run(a.path(), "bloch", &cfg, &[]), run(b.path(), "bloch", &cfg, &[]));
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(oa.stdout, ob.stdout);
    for f in ["bloch_cd.csv", "bloch_no_cd.csv", "bloch_snapshots.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
    // 11 snapshots of 8 sites plus the header.
    assert_eq!(read(a.path(), "bloch_snapshots.csv").lines().count(), 1 + 11 * 8);
}

#[test]
fn halving_steps_keeps_bloch_norm_within_tolerance() {
    let dir = TempDir::new().unwrap();
    for steps in [2000, 1000] {
        let s = summary(&run(dir.path(), "bloch", &json!({ "steps": steps }), &[]));
        assert!(s["max_norm_drift"].as_f64().unwrap() <= 1e-8);
        assert!(s["max_abs_my_cd"].as_f64().unwrap() < s["max_abs_my_no_cd"].as_f64().unwrap());
    }
}

#[test]
fn batch_is_independent_of_worker_count() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let cfg = small_batch("fully-connected");
    let oa = run(a.path(), "fidelity-batch", &cfg, &["--workers", "1"]);
    let ob = run(b.path(), "fidelity-batch", &cfg, &["--workers", "2"]);
    assert!(matches!(oa.status.code(), Some(0 | 3)));
    assert_eq!(oa.status.code(), ob.status.code());
    let csv = read(a.path(), "fidelity_samples.csv");
    assert_eq!(csv, read(b.path(), "fidelity_samples.csv"));

    let s = summary(&oa);
    for g in s["groups"].as_array().unwrap() {
        let j = g["j_seed"].as_u64().unwrap().to_string();
        let rows: Vec<&str> = csv.lines().skip(1).filter(|l| l.split(',').next() == Some(&j)).collect();
        let improved = rows.iter().filter(|l| l.split(',').nth(4) == Some("true")).count();
        assert_eq!(rows.len(), 3);
        assert_eq!(g["improved"].as_u64().unwrap() as usize, improved);
        assert_eq!(g["fraction_improved"].as_f64().unwrap(), improved as f64 / 3.0);
    }
}

#[test]
fn chain_batch_runs() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "fidelity-batch", &small_batch("chain"), &[]);
    assert!(matches!(o.status.code(), Some(0 | 3)));
    assert_eq!(read(dir.path(), "fidelity_samples.csv").lines().count(), 1 + 6);
}

#[test]
fn single_shot_success_curve() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({ "steps": 500, "success": { "total_times": [0.5, 1.0], "shots": 1 } });
    let o = run(dir.path(), "success-curve", &cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&o);
    assert_eq!(s["neel_target"], "01010101");
    let points = s["success_curve"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    for p in points {
        assert!(matches!(p["successes"].as_u64(), Some(0 | 1)));
        let (lo, hi) = (p["wilson_low"].as_f64().unwrap(), p["wilson_high"].as_f64().unwrap());
        assert!(0.0 <= lo && lo < hi && hi <= 1.0);
    }
}

#[test]
fn exported_schedules_round_trip() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "export-schedule", &json!({ "steps": 500 }), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&o)["round_trip_identical"], true);

    for name in ["schedule_mfcd.json", "schedule_linear.json"] {
        let ex = AnnealScheduleExport::load(dir.path().join("out").join(name)).unwrap();
        assert_eq!(ex.breakpoints_a.first().unwrap(), &(0.0, 0.0));
        assert_eq!(ex.breakpoints_a.last().unwrap(), &(1.0, 1.0));
        assert!(ex.breakpoints_g.iter().all(|p| p.1.abs() <= 3.0));
        ex.validate().unwrap();
    }

    // Linear baseline on a gamma = 0 instance: A(s) = s, g' = -g / (12 A).
    let lin = AnnealScheduleExport::load(dir.path().join("out/schedule_linear.json")).unwrap();
    for &(s, a) in &lin.breakpoints_a {
        assert!((a - s).abs() <= 1e-12, "A({s}) = {a}");
    }
    for &(s, gp) in lin.breakpoints_g.iter().skip(1) {
        let g = 0.5 * (std::f64::consts::PI * s).sin().powi(2) + 1e-3;
        let exact = -g / (12.0 * s);
        // Breakpoints between trace nodes are linearly interpolated.
        assert!((gp - exact).abs() <= 1e-4 * exact.abs(), "g'({s}) = {gp}, expected {exact}");
    }
}

#[test]
fn out_of_range_export_is_an_invariant_failure() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "export-schedule", &json!({ "steps": 500, "export": { "total_time": 1.0 } }), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("range"));
}

#[test]
fn bad_config_exits_one() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "bloch", &json!({ "schedule": { "total_tme": 1.0 } }), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule"));

    let o = run(dir.path(), "bloch", &json!({ "schedule": { "total_time": -1.0 } }), &[]);
    assert_eq!(o.status.code(), Some(1));

    let missing = Command::new(env!("CARGO_BIN_EXE_mfcd"))
        .args(["verify", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_passes_by_default_and_catches_a_sign_error() {
    let dir = TempDir::new().unwrap();
    let ok = run(dir.path(), "verify", &json!({}), &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(read(dir.path(), "verify.csv").lines().skip(1).all(|l| l.ends_with(",true")));

    let bad = run(dir.path(), "verify", &json!({ "verify": { "corrupt_feedback_sign": true } }), &[]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn seed_override_changes_the_instance() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({ "steps": 500 });
    let base = summary(&run(dir.path(), "bloch", &cfg, &[]));
    let other = summary(&run(dir.path(), "bloch", &cfg, &["--seed-override", "7"]));
    assert_ne!(base["instance_hash"], other["instance_hash"]);
    let run_json: Value = serde_json::from_str(&read(dir.path(), "bloch_run.json")).unwrap();
    assert_eq!(run_json["config"]["instance"]["j_seed"], 7);
}
