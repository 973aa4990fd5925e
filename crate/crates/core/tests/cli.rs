//! The installed binary: exit codes, output routing and reproducibility.

use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergodic-dirac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn clifford_table_passes_and_reports_all_rows() {
    let o = bin(&["clifford-table", "--max-n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "1");
    assert_eq!(v["all_match"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [
        &["nct-verify", "--n", "2", "--N", "4", "--seed", "3", "--pairs", "8"][..],
        &["su2", "--cutoff", "4", "--choices", "10", "--seed", "11"][..],
        &["summability", "--n", "3", "--N", "4", "--format", "csv"][..],
    ] {
        let a = bin(args);
        let b = bin(args);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn different_seeds_change_random_theta() {
    let a = bin(&["nct-verify", "--n", "2", "--N", "3", "--seed", "1", "--pairs", "2"]);
    let b = bin(&["nct-verify", "--n", "2", "--N", "3", "--seed", "2", "--pairs", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn wrong_exponent_on_ergodic_torus_exits_one() {
    let o = bin(&["summability", "--n", "2", "--N", "20", "--exponent", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summability"]["verdict"], "growing");
}

#[test]
fn non_ergodic_run_reports_kernel_probe() {
    let o = bin(&[
        "summability",
        "--n",
        "2",
        "--N",
        "6",
        "--active",
        "1",
        "--n-list",
        "3,6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ergodic"], false);
    let rows = v["kernel_probe"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["kernel"], 14);
    assert_eq!(rows[1]["kernel"], 26);
    assert_eq!(v["kernel_probe"]["verdict"], "fails compact resolvent");
}

#[test]
fn malformed_theta_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    std::fs::write(&path, "[[0, 0.2], [0.3, 0]]").unwrap();
    let o = bin(&["nct-verify", "--n", "2", "--N", "3", "--theta", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("antisymmetric"));
}

#[test]
fn bad_arguments_exit_two_and_help_exits_zero() {
    assert_eq!(bin(&["nct-verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        bin(&["summability", "--n", "2", "--active", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["clifford-table", "--max-n", "0"]).status.code(), Some(2));
    assert_eq!(bin(&[]).status.code(), Some(2));
    let help = bin(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("nct-verify"));
}

#[test]
fn odd_rank_skips_grading() {
    let o = bin(&["nct-verify", "--n", "3", "--N", "3", "--pairs", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["skipped"][0]["check"], "grading");
    assert_eq!(v["skipped"][0]["reason"], "n odd (3), skipped");
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn out_flag_writes_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let o = bin(&[
        "clifford-table",
        "--max-n",
        "4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let direct = bin(&["clifford-table", "--max-n", "4", "--format", "csv"]);
    assert_eq!(written.as_bytes(), &direct.stdout[..]);
    assert_eq!(written.lines().count(), 5);
}
