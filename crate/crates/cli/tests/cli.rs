//! End-to-end tests of the `collapse-photons` binary: config diagnostics,
//! scenario summaries, CSV determinism, and strict-mode exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_collapse-photons"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn vulcan_summary_reports_low_regime_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("vulcan.csv");
    let out = bin()
        .args(["laser-loss", "--config"])
        .arg(scenarios_dir().join("vulcan.cfg"))
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let s = stdout(&out);
    // quoted headline coefficient ~0.75e4
    assert!(s.contains("loss_coefficient_low = 7.4230"), "{s}");
    let body = fs::read_to_string(&csv).unwrap();
    assert!(body.contains("k_cm_inv,P_per_d3k,cumulative_fraction"), "{body}");
}

#[test]
fn csv_byte_identical_for_same_config_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = bin()
            .args(["cosmology", "--config"])
            .arg(scenarios_dir().join("cmb-default.cfg"))
            .args(["--seed", "42", "--out"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn cosmology_defaults_fractional_loss_near_headline_value() {
    let out = bin()
        .args(["cosmology", "--config"])
        .arg(scenarios_dir().join("cmb-default.cfg"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = stdout(&out);
    let line = s
        .lines()
        .find(|l| l.contains("fractional_loss(0.1 cm)"))
        .unwrap();
    let value: f64 = line.split("= ").nth(1).unwrap().trim().parse().unwrap();
    assert!((value / 0.6 - 1.0).abs() < 0.10, "{value}");
    // the CSV (stdout tail) carries the validity column
    assert!(s.contains("lambda0_cm,planck_occupancy,distorted_occupancy,fractional_loss,validity_flag"));
}

#[test]
fn cosmology_strict_fails_on_invalid_rows() {
    let out = bin()
        .args(["cosmology", "--strict", "--config"])
        .arg(scenarios_dir().join("cmb-default.cfg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("outside approximation validity"));
}

#[test]
fn config_errors_are_collected_with_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(
        &cfg,
        "[laser-loss]\nlambda0_nm = 1053\nsigma_cm = oops\nbogus = 1\nn0 = 1e12\nlambda_rate = -2\na_cm = 1e-5\nt_s = 1\n",
    )
    .unwrap();
    let out = bin()
        .args(["laser-loss", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let e = stderr(&out);
    assert!(e.contains("line 3") && e.contains("finite number"), "{e}");
    assert!(e.contains("line 4") && e.contains("unknown key"), "{e}");
    assert!(e.contains("line 6") && e.contains("lambda_rate must be >= 0"), "{e}");
}

#[test]
fn empty_config_reports_missing_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    fs::write(&cfg, "").unwrap();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing scenario kind"));
}

#[test]
fn kind_mismatch_between_config_and_subcommand_rejected() {
    let out = bin()
        .args(["laser-loss", "--config"])
        .arg(scenarios_dir().join("cmb-default.cfg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("declares kind cosmology"));
}

#[test]
fn superposition_demo_runs_and_reports_bracket() {
    let out = bin()
        .args(["superposition", "--config"])
        .arg(scenarios_dir().join("superposition-demo.cfg"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let s = stdout(&out);
    assert!(s.contains("enhancement bracket"), "{s}");
    assert!(s.contains("t_s,offdiag"), "{s}");
}

#[test]
fn fock_sim_conserves_trace_and_number_in_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fock.cfg");
    fs::write(
        &cfg,
        "[fock-sim]\nmodes = 0,0,1;0,0,2\ninitial = 1,0|0,1\nn_max = 2\nl_box_cm = 1\nlambda_rate = 1e24\na_cm = 0.12\nt_s = 1e-7\nrecord_every = 5\n",
    )
    .unwrap();
    let csv = dir.path().join("fock.csv");
    let out = bin()
        .args(["fock-sim", "--strict", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}\n{}", stdout(&out), stderr(&out));
    let body = fs::read_to_string(&csv).unwrap();
    for line in body.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[1] - 1.0).abs() < 1e-8, "trace row: {line}");
        assert!((cols[2] - 1.0).abs() < 1e-8, "number row: {line}");
    }
}

#[test]
fn validate_suite_passes() {
    let out = bin()
        .args(["validate", "--samples", "150000"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let s = stdout(&out);
    assert!(s.contains("0 failed"), "{s}");
    assert!(!s.contains("[FAIL]"), "{s}");
}

#[test]
fn lcls_high_regime_coefficient_is_100() {
    let out = bin()
        .args(["laser-loss", "--config"])
        .arg(scenarios_dir().join("lcls.cfg"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let s = stdout(&out);
    let line = s.lines().find(|l| l.contains("loss_coefficient_high = ")).unwrap();
    let value: f64 = line.split("loss_coefficient_high = ").nth(1).unwrap().trim().parse().unwrap();
    assert!((value / 100.0 - 1.0).abs() < 1e-6, "{value}");
}
