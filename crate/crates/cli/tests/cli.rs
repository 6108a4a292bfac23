use std::path::{Path, PathBuf};
use std::process::Command;

use ncdc_cli::config::RunConfig;
use ncdc_cli::report::strip_volatile;

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn ncdc(args: &[&str], config: &Path, out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_ncdc"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn flat_derive_gives_the_bracket_equation() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = ncdc(&["derive", "--latex"], &config_path("flat_n2.json"), dir.path());
    assert_eq!(code, 0);
    assert!(stdout.contains("D[t](A) = -{H,A}"));
    let r = report(dir.path());
    assert_eq!(r["summary"]["derivation"]["bracket_form"], "D[t](A) = -{H,A}");
    assert_eq!(r["summary"]["conventions"]["riemann_sign"], 1);
    assert!(dir.path().join("equation.tex").exists());
}

#[test]
fn records_have_the_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = ncdc(&["universal"], &config_path("quick.json"), dir.path());
    assert_eq!(code, 0);
    let r = report(dir.path());
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["id", "anchor", "status", "residual", "timing_ms"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
    assert_eq!(r["summary"]["totals"]["failed"], 0);
    assert_eq!(r["summary"]["subcommand"], "universal");
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(ncdc(&["ito"], &config_path("quick.json"), d.path()).0, 0);
    }
    let (mut ra, mut rb) = (report(a.path()), report(b.path()));
    strip_volatile(&mut ra);
    strip_volatile(&mut rb);
    assert_eq!(ra, rb);
}

#[test]
fn seed_flag_changes_stochastic_results() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ncdc(&["ito", "--seed", "1"], &config_path("quick.json"), a.path());
    ncdc(&["ito", "--seed", "2"], &config_path("quick.json"), b.path());
    let (ra, rb) = (report(a.path()), report(b.path()));
    assert_eq!(ra["summary"]["seed"], 1);
    assert_ne!(ra["checks"][0]["residual"], rb["checks"][0]["residual"]);
}

#[test]
fn failed_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"chart":{"dim":1},"suites":{"ito":{"steps":1024,"paths":16}},"tolerances":{"ito_ratio":1000.0}}"#,
    );
    let (code, _) = ncdc(&["ito"], &cfg, &dir.path().join("out"));
    assert_eq!(code, 1);
    let r = report(&dir.path().join("out"));
    assert!(r["summary"]["totals"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(ncdc(&["ito"], &dir.path().join("missing.json"), &out).0, 2);
    let bad = write_config(dir.path(), r#"{"chart":{"dim":2},"unexpected":true}"#);
    assert_eq!(ncdc(&["ito"], &bad, &out).0, 2);
    let bad = write_config(dir.path(), r#"{"chart":{"dim":2},"expressions":{"hamiltonian":"H +"}}"#);
    assert_eq!(ncdc(&["derive"], &bad, &out).0, 2);
    // Symplectic suites need an even dimension.
    assert_eq!(ncdc(&["derive", "--dim", "3"], &config_path("flat_n2.json"), &out).0, 2);
    assert!(!out.join("report.json").exists());
}

#[test]
fn component_maps_fill_symmetric_partners() {
    let cfg = RunConfig::parse(
        r#"{"chart":{"dim":2},"expressions":{"gamma":{"1,1,2":"x[1]"},"b":{"1,2":"1"},"omega":{"1,2":"1"}}}"#,
    )
    .unwrap();
    let table = cfg.table().unwrap();
    let res = ncdc_cli::config::Resolved::new(&cfg, &table).unwrap();
    let g = res.gamma().unwrap();
    assert_eq!(g.get(1, 2, 1), g.get(1, 1, 2));
    assert!(g.get(2, 1, 2).is_zero());
    let b = res.b.as_ref().unwrap();
    assert_eq!(b[&vec![2, 1]], b[&vec![1, 2]]);
    let data = ncdc_cli::config::symplectic(&cfg, &table, ncdc_core::ScalarExpr::zero()).unwrap();
    assert_eq!(data.w(2, 1), &-data.w(1, 2).clone());
}

#[test]
fn inconsistent_components_are_rejected() {
    let cfg = RunConfig::parse(r#"{"chart":{"dim":2},"expressions":{"omega":{"1,2":"1","2,1":"1"}}}"#).unwrap();
    let table = cfg.table().unwrap();
    assert!(ncdc_cli::config::symplectic(&cfg, &table, ncdc_core::ScalarExpr::zero()).is_err());
    let cfg = RunConfig::parse(r#"{"chart":{"dim":2},"expressions":{"b":{"1,3":"1"}}}"#).unwrap();
    assert!(ncdc_cli::config::Resolved::new(&cfg, &cfg.table().unwrap()).is_err());
}
