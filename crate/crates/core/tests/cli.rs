//! End-to-end runs of the `pppconc` binary.

use std::path::Path;
use std::process::Command;

use pppconc::harness::output::csv_body;

fn run(sub: &str, config: &str, dir: &Path, extra: &[&str]) -> std::process::Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_pppconc"))
        .arg(sub)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn bounds_table_writes_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("bounds-table", r#"{"upsilon":[1,5],"x_grid":[0,1,2]}"#, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/bounds-table.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# pppconc "));
    assert!(lines.next().unwrap().starts_with("# config_sha256 "));
    assert_eq!(lines.next().unwrap(), "# seed 0");
    assert!(lines.next().unwrap().starts_with("upsilon,x,right_log"));
    assert_eq!(csv_body(&text).lines().count(), 7);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/bounds-table.json")).unwrap()).unwrap();
    assert_eq!(summary["meta"]["experiment"], "bounds-table");
}

#[test]
fn bounds_table_with_model_adds_integrated_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"model":{"family":"constant","params":{"level":2}},"gamma":{"family":"polynomial","p":2},
                 "n_grid":[100,1000]}"#;
    let out = run("bounds-table", cfg, dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = csv_body(&std::fs::read_to_string(dir.path().join("out/integrated.csv")).unwrap());
    assert_eq!(body.lines().count(), 3);
    assert!(body.lines().nth(2).unwrap().starts_with("1000,4,"));
}

#[test]
fn conc_refuses_small_replication_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"model":{"family":"constant","params":{"level":5}},"n":1,"R":500,
                 "class":[{"kind":"constant","c":1.0}]}"#;
    let out = run("conc", cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("bounds-table", r#"{"bogus":true}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run("risk", r#"{"experiment":"bounds-table"}"#, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_pppconc"))
        .args(["simulate", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn negative_intensity_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"model":{"family":"finite-fourier","params":{"coeffs":{"J":1,"values":[0,0.1,5]}}},"n":3}"#;
    let out = run("simulate", cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn runs_are_reproducible_across_threads() {
    let cfg = r#"{"model":{"family":"sobolev-decay","params":{"p":2,"amplitude":1,"mass":3}},
                 "gamma":{"family":"polynomial","p":2},"n_grid":[16,64],"R":8,"seed":9}"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run("risk", cfg, a.path(), &["--threads", "1"]).status.success());
    assert!(run("risk", cfg, b.path(), &["--threads", "3"]).status.success());
    let read = |d: &Path| std::fs::read_to_string(d.join("out/risk.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn every_experiment_runs() {
    let model = r#""model":{"family":"analytic-decay","params":{"rho":1,"amplitude":1,"mass":3}}"#;
    let gamma = r#""gamma":{"family":"analytic","rho":1}"#;
    let cases = [
        ("simulate", format!("{{{model},\"n\":3}}"), "simulate.csv"),
        ("coeffs", format!("{{{model},\"n\":3,\"J\":4}}"), "coeffs.csv"),
        ("estimate", format!("{{{model},{gamma},\"n\":50}}"), "estimate.csv"),
        ("adapt", format!("{{{model},\"n\":50,\"penalty_scale\":\"oracle\"}}"), "adapt.csv"),
        ("conc", format!("{{{model},\"n\":2,\"R\":1000,\"class\":[{{\"kind\":\"scaled-trig\",\"j\":1,\"amplitude\":1}}]}}"), "conc.csv"),
    ];
    for (sub, cfg, file) in cases {
        let dir = tempfile::tempdir().unwrap();
        let out = run(sub, &cfg, dir.path(), &["--seed", "4"]);
        assert!(out.status.success(), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
        let text = std::fs::read_to_string(dir.path().join("out").join(file)).unwrap();
        assert!(text.contains("# seed 4"));
        assert!(dir.path().join("out").join(format!("{sub}.json")).exists());
    }
}
