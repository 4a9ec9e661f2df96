use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn washburn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_washburn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn simulate_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "simulate",
        "--omega",
        "1",
        "--beta",
        "1",
        "--alpha",
        "0",
        "--horizon",
        "30",
        "--out",
    ];
    let out = dir.to_str().unwrap();
    args.push(out);
    args.extend_from_slice(extra);
    washburn(&args)
}

#[test]
fn simulate_writes_artifacts_from_rest() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["trajectory.csv", "summary.json", "plot.gp", "run.json"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,u,v,H,T,E,V");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(&first[..6], &[0.0; 6]);
    assert!((first[6] - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn simulate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(simulate_into(a.path(), &[]).status.success());
    assert!(simulate_into(b.path(), &[]).status.success());
    for name in ["trajectory.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name} differs"
        );
    }
}

#[test]
fn regularized_run_reports_difference() {
    let dir = tempfile::tempdir().unwrap();
    let out = simulate_into(dir.path(), &["--epsilon", "1e-4"]);
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let d = summary["epsilon_sup_difference"].as_f64().unwrap();
    assert!(d > 0.0 && d < 1e-2, "{d}");
}

#[test]
fn classification_at_critical_omega() {
    let dir = tempfile::tempdir().unwrap();
    let out = washburn(&[
        "simulate",
        "--omega",
        "0.25",
        "--beta",
        "1",
        "--alpha",
        "0",
        "--horizon",
        "40",
        "--classify",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(
        summary["classification"]["linear"]["kind"],
        "StableInflectedNode"
    );
}

#[test]
fn invalid_parameters_exit_with_config_code() {
    let out = washburn(&["simulate", "--omega", "1", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = washburn(&["simulate", "--omega", "1", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = washburn(&["simulate", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = washburn(&["verify", "--only", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_params_file_is_an_io_failure() {
    let out = washburn(&["nondim", "--params", "/nonexistent/fluid.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn basin_report_on_stdout() {
    let out = washburn(&["basin", "--alpha", "1"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["basin"]["C"].as_f64(), Some(0.0));
    assert_eq!(report["basin"]["u_min"].as_f64(), Some(0.5));
}

#[test]
fn nondim_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("water.json");
    fs::write(
        &path,
        r#"{"rho": 1000, "mu": 0.001, "gamma": 0.0728, "theta_deg": 0, "g": 9.81, "R": 1e-4, "L": 0, "h0": 0}"#,
    )
    .unwrap();
    let out = washburn(&["nondim", "--params", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["h_e"].as_f64().unwrap() - 0.14841997961264016).abs() < 1e-15);
}

#[test]
fn regime_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = washburn(&[
        "regime",
        "--case",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("regime.csv")).unwrap();
    assert!(csv.starts_with("t,h,u,du,h_oracle,residual\n"));
}

#[test]
fn verify_only_basin_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.json");
    let out = washburn(&[
        "verify",
        "--only",
        "basin",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["suite"] == "basin"));
}
