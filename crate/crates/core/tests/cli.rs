use alpha_msrk::ExperimentConfig;
use std::path::Path;
use std::process::{Command, Output};

fn msrk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msrk")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn tableau_check_passes() {
    let o = msrk(&["tableau-check", "--s", "3", "--r", "2", "--alpha", "-0.7", "0.9"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("X ="));
    assert_eq!(text.matches("symplecticity residual").count(), 2);
}

#[test]
fn tableau_check_rejects_bad_stage_count() {
    assert_eq!(code(&msrk(&["tableau-check", "--s", "9"])), 2);
}

#[test]
fn run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero");
    let o = msrk(&["run", "--mode", "zero", "--T", "0.4", "--L", "20", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let expect = [
        ("energy_series.csv", "t,energy,drift"),
        ("momentum_series.csv", "t,momentum,drift"),
        ("alpha_field.csv", "x,t,alpha"),
        ("local_ecl.csv", "x,t,ecl,mcl"),
        ("snapshots.csv", "t,x,u"),
    ];
    for (file, head) in expect {
        assert_eq!(header(&out.join(file)), head, "{file}");
    }
    assert!(header(&out.join("stats.csv")).starts_with("step,t,predictor_iterations"));
    let energy = std::fs::read_to_string(out.join("energy_series.csv")).unwrap();
    assert_eq!(energy.lines().count(), 1 + 5);
    let snaps = std::fs::read_to_string(out.join("snapshots.csv")).unwrap();
    assert_eq!(snaps.lines().count(), 1 + 5 * 40);
}

#[test]
fn manifest_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let cfg = ExperimentConfig {
        domain_length: 30.0,
        t_final: 0.2,
        dx: 0.5,
        ..Default::default()
    };
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = dir.path().join("o");
    let o = msrk(&["run", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run_manifest.json")).unwrap()).unwrap();
    let back: ExperimentConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(manifest["unknowns_per_cell"], 21);
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = msrk(&["run", "--T", "0.3", "--L", "30", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    for file in ["energy_series.csv", "momentum_series.csv", "alpha_field.csv", "local_ecl.csv", "snapshots.csv"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    assert_eq!(code(&msrk(&["run", "--dx", "0.3", "--out", out])), 2);
    assert_eq!(code(&msrk(&["run", "--dt", "-0.1", "--out", out])), 2);
    assert_eq!(code(&msrk(&["run", "--tol", "0", "--out", out])), 2);
    assert_eq!(code(&msrk(&["run", "--config", "/nonexistent/cfg.json", "--out", out])), 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"L": 100, "gamma": 3}"#).unwrap();
    assert_eq!(code(&msrk(&["run", "--config", bad.to_str().unwrap(), "--out", out])), 2);
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&msrk(&["run", "--config", bad.to_str().unwrap(), "--out", out])), 2);
    std::fs::write(&bad, r#"{"profile": {"kind": "soliton-pair", "beta": 1.5}}"#).unwrap();
    assert_eq!(code(&msrk(&["run", "--config", bad.to_str().unwrap(), "--out", out])), 2);
    assert_eq!(code(&msrk(&["run", "--mode", "fast", "--out", out])), 2);
}

#[test]
fn solver_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = msrk(&["run", "--mode", "zero", "--T", "0.2", "--L", "20", "--maxit", "1", "--tol", "1e-15", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 0"));
    // the partial run is still written
    assert!(out.join("energy_series.csv").exists());
}

#[test]
fn compare_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let o = msrk(&["compare", "--T", "0.3", "--L", "30", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("wall-time ratio"));
    assert!(out.join("summary.txt").exists());
    assert!(header(&out.join("summary.csv")).starts_with("mode,steps_requested"));
    assert!(out.join("alpha/alpha_field.csv").exists());
    assert!(out.join("zero/energy_series.csv").exists());
}
