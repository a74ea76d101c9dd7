//! End-to-end runs of the `adscmc` binary.

use std::fs;
use std::process::Command;

fn adscmc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_adscmc")).args(args).env("ADSCMC_THREADS", "1").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn foliate_from_file_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.txt");
    let mut text = String::from("# angle value\n");
    for i in 0..32 {
        let phi = std::f64::consts::TAU * i as f64 / 32.0;
        text.push_str(&format!("{phi} {}\n", 0.2 * phi.cos()));
    }
    fs::write(&data, text).unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "radii = 1.0\nmesh_h = 0.2\n").unwrap();
    let out_dir = dir.path().join("family");
    let (code, stdout, stderr) = adscmc(&[
        "--config",
        cfg.to_str().unwrap(),
        "foliate",
        "--boundary",
        data.to_str().unwrap(),
        "--Hmin",
        "-1",
        "--Hmax",
        "1",
        "--count",
        "3",
        "--export",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stdout}{stderr}");
    assert!(out_dir.join("manifest.json").exists());
    let (code, stdout, stderr) = adscmc(&["verify", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}{stderr}");
}

#[test]
fn inadmissible_data_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("steep.txt");
    let mut text = String::new();
    for i in 0..16 {
        let phi = std::f64::consts::TAU * i as f64 / 16.0;
        text.push_str(&format!("{phi} {}\n", 2.0 * phi.sin()));
    }
    fs::write(&data, text).unwrap();
    let (code, _, stderr) = adscmc(&["extend", "--boundary", data.to_str().unwrap(), "--grid", "2"]);
    assert_ne!(code, 0);
    assert!(!stderr.is_empty());
}

#[test]
fn unknown_command_is_a_usage_error() {
    let (code, _, _) = adscmc(&["frobnicate"]);
    assert_eq!(code, 2);
}
