//! Harness behavior: config validation with named fields, file layout of
//! each experiment, external observation input, and the CLI contract.

use srp_cli::config::{ExperimentConfig, GridConfig, Spacing};
use srp_cli::experiments::run_experiment;
use std::path::Path;
use std::process::Command;

fn load(dir: &Path, body: &str) -> anyhow::Result<ExperimentConfig> {
    let path = dir.join("config.json");
    std::fs::write(&path, body).expect("write config");
    ExperimentConfig::load(&path)
}

#[test]
fn log_spacing_is_geometric() {
    let grid = GridConfig {
        start: 1.0,
        stop: 100.0,
        points: 3,
        spacing: Spacing::Log,
    };
    let v = grid.values("time_grid").expect("valid grid");
    assert_eq!(v.len(), 3);
    assert!((v[1] - 10.0).abs() < 1e-12 && (v[2] - 100.0).abs() < 1e-12);

    let bad = GridConfig {
        start: 0.0,
        ..grid
    };
    let err = bad.values("time_grid").expect_err("zero start");
    assert!(err.to_string().contains("time_grid"));
}

#[test]
fn config_errors_name_the_offending_field() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cases = [
        (
            // unknown key
            r#"{"kind": "fit", "seeds": [1], "n_list": [10], "typo_field": 3}"#,
            "typo_field",
        ),
        (
            // n_list must increase
            r#"{"kind": "fit", "seeds": [1], "n_list": [100, 100]}"#,
            "n_list",
        ),
        (
            // log grid from zero
            r#"{"kind": "fit", "seeds": [1], "n_list": [10],
                "scaled_time_grid": {"start": 0.0, "stop": 1.0, "points": 5, "spacing": "log"}}"#,
            "scaled_time_grid",
        ),
    ];
    for (body, needle) in cases {
        let err = load(dir.path(), body).expect_err("invalid config");
        let msg = format!("{err:#}");
        assert!(msg.contains(needle), "error {msg:?} should name {needle:?}");
    }
}

#[test]
fn missing_sections_are_reported_by_name() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = load(
        dir.path(),
        r#"{"kind": "boundary_convergence", "seeds": [1], "n_list": [50],
            "time_grid": {"start": 0.5, "stop": 1.0, "points": 3}}"#,
    )
    .expect("parses");
    let err = run_experiment(&config, dir.path()).expect_err("mixture missing");
    assert!(format!("{err:#}").contains("mixture"));
}

#[test]
fn short_horizon_is_rejected_against_the_grid() {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = load(
        dir.path(),
        r#"{"kind": "boundary_convergence", "seeds": [1], "n_list": [50],
            "mixture": [{"weight": 1.0, "intensity": {"type": "homogeneous", "rate": 1.0}}],
            "layout": "proportional", "horizon": 0.5,
            "time_grid": {"start": 0.5, "stop": 2.0, "points": 4}}"#,
    )
    .expect("parses");
    let err = run_experiment(&config, dir.path()).expect_err("horizon too short");
    let msg = format!("{err:#}");
    assert!(msg.contains("horizon") && msg.contains('2'), "got {msg:?}");
}

#[test]
fn sup_norm_sweep_writes_per_size_and_limit_tables() {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("out");
    let config = load(
        dir.path(),
        r#"{"kind": "sup_norm_sweep", "seeds": [1, 2], "n_list": [50, 200],
            "mixture": [{"weight": 1.0, "intensity": {"type": "homogeneous", "rate": 1.0}}],
            "layout": "proportional", "horizon": 2.0,
            "time_grid": {"start": 0.1, "stop": 2.0, "points": 40}}"#,
    )
    .expect("parses");
    let summary = run_experiment(&config, &out).expect("runs");
    for name in [
        "sup_norm_sweep_50.csv",
        "sup_norm_sweep_200.csv",
        "sup_norm_sweep_limit.csv",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let metrics: Vec<&str> = summary
        .rows()
        .iter()
        .map(|r| r.split(',').nth(2).expect("metric column"))
        .collect();
    assert_eq!(
        metrics,
        ["sup_abs_dev", "max_seed_sup", "sup_abs_dev", "max_seed_sup"]
    );
    let header = std::fs::read_to_string(out.join("sup_norm_sweep_limit.csv")).expect("readable");
    assert!(header.starts_with("t,Yc_limit\n"));
}

#[test]
fn fit_reads_external_observations() {
    use srp_core::timechange::{CurveForm, RankingCurve};
    let dir = tempfile::tempdir().expect("tempdir");
    let curve = RankingCurve::new(300, 0.6, CurveForm::Sum).expect("valid curve");
    let mut rows = vec!["S,x".to_string()];
    for j in 0..40 {
        let s = 20.0 * 500f64.powf(j as f64 / 39.0);
        let x = curve.x_at(s).expect("valid S").max(1.0);
        rows.push(format!("{s},{x}"));
    }
    let obs_path = dir.path().join("records.csv");
    std::fs::write(&obs_path, rows.join("\n")).expect("write records");

    let out = dir.path().join("out");
    let config = load(
        dir.path(),
        &format!(
            r#"{{"kind": "fit", "seeds": [3], "n_list": [300],
                "fit_input": {:?}}}"#,
            obs_path
        ),
    )
    .expect("parses");
    let summary = run_experiment(&config, &out).expect("runs");
    let b_hat: f64 = summary.rows()[0]
        .split(',')
        .nth(3)
        .expect("value column")
        .parse()
        .expect("numeric");
    assert!((b_hat - 0.6).abs() < 1e-3, "recovered {b_hat}");
    assert!(out.join("fit_obs_300.csv").is_file());
    let result = std::fs::read_to_string(out.join("fit_300.csv")).expect("readable");
    assert!(result.starts_with("b_hat,rms,ci90\n"));
}

#[test]
fn fit_input_header_must_match() {
    let dir = tempfile::tempdir().expect("tempdir");
    let obs_path = dir.path().join("records.csv");
    std::fs::write(&obs_path, "S;x\n1.0;2.0\n").expect("write records");
    let config = load(
        dir.path(),
        &format!(
            r#"{{"kind": "fit", "seeds": [1], "n_list": [100], "fit_input": {:?}}}"#,
            obs_path
        ),
    )
    .expect("parses");
    let err = run_experiment(&config, dir.path()).expect_err("bad header");
    assert!(format!("{err:#}").contains("S,x"));
}

#[test]
fn cli_rejects_a_kind_subcommand_mismatch() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("config.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "boundary_convergence", "seeds": [1], "n_list": [50],
            "mixture": [{"weight": 1.0, "intensity": {"type": "homogeneous", "rate": 1.0}}],
            "layout": "proportional", "horizon": 1.0,
            "time_grid": {"start": 0.5, "stop": 1.0, "points": 2}}"#,
    )
    .expect("write config");
    let output = Command::new(env!("CARGO_BIN_EXE_srp-cli"))
        .args(["tail_convergence", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("boundary_convergence") && stderr.contains("tail_convergence"),
        "stderr was {stderr:?}"
    );
}

#[test]
fn cli_seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("config.json");
    std::fs::write(
        &cfg,
        r#"{"kind": "boundary_convergence", "seeds": [1, 2], "n_list": [80],
            "mixture": [{"weight": 1.0, "intensity": {"type": "homogeneous", "rate": 1.0}}],
            "layout": "proportional", "horizon": 1.0,
            "time_grid": {"start": 0.2, "stop": 1.0, "points": 5}}"#,
    )
    .expect("write config");
    let run = |out: &Path, seeds: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_srp-cli"));
        cmd.arg("boundary_convergence")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(out);
        if let Some(s) = seeds {
            cmd.args(["--seeds", s]);
        }
        assert!(cmd.status().expect("binary runs").success());
        std::fs::read(out.join("boundary_convergence_80.csv")).expect("readable")
    };
    let defaulted = run(&dir.path().join("a"), None);
    let same = run(&dir.path().join("b"), Some("1,2"));
    let overridden = run(&dir.path().join("c"), Some("7,8,9"));
    assert_eq!(defaulted, same, "explicit --seeds 1,2 must match the config run");
    assert_ne!(defaulted, overridden, "--seeds 7,8,9 must change the draw");
}
