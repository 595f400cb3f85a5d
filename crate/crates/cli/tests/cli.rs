//! End-to-end tests for the `inclab` binary: exit codes, determinism of the
//! gen → highlow pipeline, selfcheck wiring, and the unital JSON numbers.

use std::path::Path;
use std::process::{Command, Output};

fn inclab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inclab"))
        .env("INCLAB_OUT", dir)
        .args(args)
        .output()
        .expect("spawn inclab")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn gen_highlow_pipeline_is_deterministic() {
    let tmp_a = tempfile::tempdir().unwrap();
    let tmp_b = tempfile::tempdir().unwrap();
    for tmp in [tmp_a.path(), tmp_b.path()] {
        let out = inclab(
            tmp,
            &[
                "gen",
                "--kind",
                "uniform_random",
                "--n",
                "300",
                "--seed",
                "11",
                "--selfcheck",
            ],
        );
        assert_ok(&out);
        let out = inclab(
            tmp,
            &[
                "highlow",
                "--input",
                tmp.join("config.txt").to_str().unwrap(),
                "--wmin",
                "2^-6",
                "--wmax",
                "2^-2",
                "--selfcheck",
            ],
        );
        assert_ok(&out);
    }
    for name in ["config.txt", "highlow.csv"] {
        let a = std::fs::read(tmp_a.path().join(name)).unwrap();
        let b = std::fs::read(tmp_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // Unknown generator kind.
    let out = inclab(tmp.path(), &["gen", "--kind", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    // Missing input file.
    let out = inclab(
        tmp.path(),
        &["highlow", "--input", "/nonexistent.txt", "--wmin", "2^-4", "--wmax", "2^-2"],
    );
    assert_eq!(out.status.code(), Some(2));
    // Bad scale literal (clap value-parser rejection also exits 2).
    let out = inclab(
        tmp.path(),
        &["incidence", "--input", "/nonexistent.txt", "--w", "nonsense"],
    );
    assert_eq!(out.status.code(), Some(2));
    // Failed runs leave no partial outputs.
    assert!(!tmp.path().join("highlow.csv").exists());
}

#[test]
fn uniformize_and_branching_selfchecks_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let out = inclab(
        tmp.path(),
        &["gen", "--kind", "uniform_random", "--n", "400", "--seed", "5"],
    );
    assert_ok(&out);
    let cfg = tmp.path().join("config.txt");
    let cfg = cfg.to_str().unwrap();
    let out = inclab(
        tmp.path(),
        &["uniformize", "--input", cfg, "--m", "3", "--t", "1", "--selfcheck"],
    );
    assert_ok(&out);
    assert!(tmp.path().join("certificate.json").exists());
    let out = inclab(
        tmp.path(),
        &[
            "branching", "--input", cfg, "--m", "3", "--t", "1", "--uniformize", "--selfcheck",
        ],
    );
    assert_ok(&out);
    let csv = std::fs::read_to_string(tmp.path().join("branching.csv")).unwrap();
    assert!(csv.starts_with("x,y,z,f\n"));
}

#[test]
fn unital_reports_frozen_p3_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let out = inclab(tmp.path(), &["unital", "--p", "3", "--selfcheck"]);
    assert_ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    // Second JSON line carries the report for p = 3: 24 unital points,
    // I = 24 tangent incidences, expected 64, bound 72.
    let report = stdout
        .lines()
        .find(|l| l.contains("\"tangency_ok\""))
        .expect("report line");
    let v: serde_json::Value = serde_json::from_str(report).unwrap();
    assert_eq!(v["points"], 24);
    assert_eq!(v["tangency_ok"], true);
    assert_eq!(v["vinh"]["incidences"], 24);
    assert_eq!(v["vinh"]["expected"], 64.0);
    assert_eq!(v["vinh"]["bound"], 72.0);
    assert_eq!(v["vinh"]["pass"], true);
}

#[test]
fn katztao_selfcheck_and_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = inclab(
        tmp.path(),
        &["katztao", "--delta", "2^-6", "--s", "1.0", "--c", "2.0", "--selfcheck"],
    );
    assert_ok(&out);
    let body = std::fs::read_to_string(tmp.path().join("katztao.txt")).unwrap();
    assert!(body.lines().count() >= 2);
}
