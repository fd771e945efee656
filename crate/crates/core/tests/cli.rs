use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn qgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgame")).args(args).output().unwrap()
}

fn without_timing(stdout: &[u8]) -> String {
    String::from_utf8(stdout.to_vec())
        .unwrap()
        .lines()
        .filter(|l| !l.contains("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn report(args: &[&str]) -> Value {
    let out = qgame(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_unique_fields() {
    let r = report(&["solve", fixture("unique.toml").to_str().unwrap()]);
    assert_eq!(r["tool"], "quantum-equilibria");
    assert_eq!(r["command"], "solve");
    assert_eq!(r["classification"]["tag"], "UniqueEigen");
    assert_eq!(r["derived"]["delta"], 24.0);
    let cert = &r["certificates"][0];
    assert!((cert["lambda"].as_f64().unwrap() - (10f64.sqrt() - 3.0)).abs() < 1e-12);
    assert!((cert["h"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!(r["oracle"].is_null());
    let raw = String::from_utf8(qgame(&["solve", fixture("unique.toml").to_str().unwrap()]).stdout).unwrap();
    let top_level: Vec<_> = raw.lines().filter(|l| l.starts_with("  \"")).collect();
    assert!(top_level.last().unwrap().starts_with("  \"timing\""));
}

#[test]
fn reports_are_reproducible() {
    for args in [
        vec!["solve", "dual.toml"],
        vec!["oracle", "unique.toml", "--resolution", "120"],
        vec!["oracle", "dual.toml", "--resolution", "120"],
    ] {
        let path = fixture(args[1]);
        let mut args = args.clone();
        args[1] = path.to_str().unwrap();
        let a = qgame(&args);
        let b = qgame(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(without_timing(&a.stdout), without_timing(&b.stdout));
    }
}

#[test]
fn classification_tags() {
    for (file, tag) in [
        ("dual.toml", "DualEigen"),
        ("no_omega.toml", "NoOmega"),
        ("degenerate.toml", "Degenerate"),
        ("no_eigen_angle.toml", "NoEigenAngle"),
        ("hypothesis_failed.toml", "HypothesisFailed"),
    ] {
        let r = report(&["solve", fixture(file).to_str().unwrap()]);
        assert_eq!(r["classification"]["tag"], tag, "{file}");
    }
}

#[test]
fn oracle_agreement_flags() {
    let r = report(&["oracle", fixture("unique_fine_epsilon.toml").to_str().unwrap()]);
    assert_eq!(r["oracle"]["angles_from"], "eigen_angle");
    assert_eq!(r["oracle"]["clusters"].as_array().unwrap().len(), 1);
    assert_eq!(r["oracle"]["agreement"], true);

    let r = report(&["oracle", fixture("unique.toml").to_str().unwrap(), "--epsilon", "0.1"]);
    assert_eq!(r["oracle"]["epsilon"], 0.1);
    assert_eq!(r["oracle"]["agreement"], true);

    let r = report(&["oracle", fixture("dual.toml").to_str().unwrap()]);
    assert_eq!(r["oracle"]["clusters"].as_array().unwrap().len(), 2);
    assert_eq!(r["oracle"]["agreement"], true);

    let r = report(&["oracle", fixture("no_omega_angles.toml").to_str().unwrap()]);
    assert_eq!(r["oracle"]["angles_from"], "input");
    assert_eq!(r["oracle"]["agreement"], true);

    let r = report(&["oracle", fixture("no_eigen_angle_angles.toml").to_str().unwrap()]);
    assert!(r["oracle"]["agreement"].is_null());
}

#[test]
fn exit_codes() {
    for bad in ["bad_arity.toml", "bad_negative.toml", "bad_angle.toml", "missing.toml"] {
        let out = qgame(&["solve", fixture(bad).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(out.stdout.is_empty());
    }
    let out = qgame(&["solve", fixture("bad_arity.toml").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 4 coefficients"));
    assert_eq!(qgame(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qgame(&["--help"]).status.code(), Some(0));
    for file in ["degenerate.toml", "no_eigen_angle.toml"] {
        assert_eq!(qgame(&["oracle", fixture(file).to_str().unwrap()]).status.code(), Some(3));
        assert_eq!(qgame(&["landscape", fixture(file).to_str().unwrap()]).status.code(), Some(3));
    }
    let out = qgame(&["landscape", fixture("unique.toml").to_str().unwrap(), "--out", "/nonexistent-dir/l.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn landscape_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.csv");
    let out = qgame(&[
        "landscape",
        fixture("unique.toml").to_str().unwrap(),
        "--resolution",
        "16",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "phi_x,phi_y,g,H");
    assert_eq!(lines.len(), 1 + 16 * 16);
    let step = std::f64::consts::TAU / 16.0;
    for (k, line) in lines[1..].iter().enumerate() {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((f[0] - (k / 16) as f64 * step).abs() < 1e-10);
        assert!((f[1] - (k % 16) as f64 * step).abs() < 1e-10);
        // trace of C is 6
        assert!((4.0 * f[3] - f[2] - 6.0).abs() < 1e-9);
    }
    let stdout = qgame(&["landscape", fixture("unique.toml").to_str().unwrap(), "--resolution", "16"]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), text);
}
