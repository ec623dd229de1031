use std::path::Path;
use std::process::Command;

use taubnut_index::charclasses::ConvergenceRow;
use taubnut_index::cli::{RunSummary, SweepRow};
use taubnut_index::eta::EtaRow;
use taubnut_index::index::IndexReport;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tn-index"));
    c.env_remove("TN_INDEX_THREADS");
    c
}

fn write_config(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    csv::Reader::from_path(path).unwrap().deserialize().map(|r| r.unwrap()).collect()
}

#[test]
fn pontryagin_mode_hits_one_twelfth_for_two_blends() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["quintic", "septic"] {
        let cfg = write_config(
            dir.path(),
            &format!("{kind}.json"),
            &format!(
                r#"{{"mode": "pontryagin", "metric": {{"variant": "exact_d", "blend": {{"r_in": 2, "r_out": 4, "kind": "{kind}"}}}}}}"#
            ),
        );
        let out = dir.path().join(kind);
        let (code, err) = run_cli(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let rows: Vec<ConvergenceRow> = read_csv(&out.join("pontryagin_convergence.csv"));
        assert_eq!(rows.iter().map(|r| r.n_r).collect::<Vec<_>>(), [32, 64, 128, 256]);
        assert!((rows.last().unwrap().value - 1.0 / 12.0).abs() < 1e-3);
    }
}

#[test]
fn eta_mode_at_half_has_zero_a0_on_every_route() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eta.json", r#"{"mode": "eta", "instanton": {"model": [[0.5, 1]]}}"#);
    let out = dir.path().join("out");
    let (code, err) = run_cli(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<EtaRow> = read_csv(&out.join("eta_routes.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.a0.abs() < 1e-6));
    let text = std::fs::read_to_string(out.join("poisson_identity.csv")).unwrap();
    assert!(text.starts_with("a,s,lhs,rhs,abs_diff\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn flat_channels_have_zero_bulk() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "flat.json",
        r#"{"mode": "index", "instanton": {"channels": [
            {"lambda": 0.3, "mcharge": 0.3, "chern": 0},
            {"lambda": 1.8, "mcharge": 1.8, "chern": -2}]}}"#,
    );
    let out = dir.path().join("out");
    let (code, _) = run_cli(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--grav", "lemma"]);
    let report: IndexReport =
        serde_json::from_str(&std::fs::read_to_string(out.join("index_report.json")).unwrap()).unwrap();
    assert!(report.bulk.abs() < 1e-8);
    // flat bundles with these holonomies have a non-integral formula value
    assert_eq!(code, 1);
    assert!(!report.integral);
}

#[test]
fn index_mode_is_byte_deterministic_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "idx.json",
        r#"{"mode": "index", "instanton": {"model": [[0.25, 1], [1.6, 2], [-0.7, 1]]}, "quad": {"n_r": 64}}"#,
    );
    let mut bodies = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let (code, err) =
            run_cli(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert_eq!(code, 0, "{err}");
        bodies.push((
            std::fs::read(out.join("index_report.json")).unwrap(),
            std::fs::read(out.join("summary.json")).unwrap(),
        ));
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));

    let report: IndexReport = serde_json::from_slice(&bodies[0].0).unwrap();
    assert_eq!(report.rank, 3);
    assert_eq!(report.nearest_integer, -1);
    assert_eq!(report.route_checks.len(), 2);
    let summary: RunSummary = serde_json::from_slice(&bodies[0].1).unwrap();
    assert!(summary.passed);
    // round trip
    assert_eq!(serde_json::from_str::<IndexReport>(&serde_json::to_string(&report).unwrap()).unwrap(), report);
}

#[test]
fn env_var_sets_threads() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let st = bin()
        .env("TN_INDEX_THREADS", "2")
        .args(["--mode", "pontryagin", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let st = bin()
        .env("TN_INDEX_THREADS", "many")
        .args(["--mode", "pontryagin", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
}

#[test]
fn geometry_and_convergence_modes_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let (code, err) = run_cli(&["--mode", "geometry-check", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(out.join("geometry_residuals.csv")).unwrap();
    assert!(text.starts_with("check,point,r,theta,phi,tau,residual,bound,pass\n"));
    assert!(!text.contains(",false\n"));

    let cfg = write_config(
        dir.path(),
        "conv.json",
        r#"{"mode": "convergence", "instanton": {"model": [[0.3, 2]]}, "sizes": [32, 64, 128]}"#,
    );
    let out = dir.path().join("c");
    let (code, err) = run_cli(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<SweepRow> = read_csv(&out.join("convergence_sweep.csv"));
    assert_eq!(rows.len(), 6);
    let bulk = rows.iter().rfind(|r| r.quantity == "bulk").unwrap();
    assert!((bulk.reference + 0.5 * 1.7f64.powi(2)).abs() < 1e-12);
    assert!(bulk.abs_error < 1e-6);
}

#[test]
fn error_statuses_and_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.json", "{\"mode\": ");
    for (args, code, kind) in [
        (vec!["--config", bad.to_str().unwrap()], 2, "parse"),
        (vec!["--config", "/nonexistent/cfg.json"], 2, "io"),
        (vec!["--route", "fastest"], 2, "parse"),
        (vec!["--mode", "index"], 3, "validation"),
        (vec!["--mode", "pontryagin", "--tol", "-1"], 3, "validation"),
    ] {
        let (got, err) = run_cli(&args);
        assert_eq!(got, code, "{args:?}: {err}");
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["kind"], kind, "{err}");
        assert!(v["message"].is_string());
    }

    let cfg = write_config(dir.path(), "gen.json", r#"{"mode": "eta", "instanton": {"model": [[3.0, 1]]}}"#);
    let (got, err) = run_cli(&["--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(got, 3, "{err}");
    assert!(err.contains("genericity"));
}
