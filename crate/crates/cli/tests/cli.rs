use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semrd"))
}

fn net(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../networks").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn semrd")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn edited(dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(net("fig4a.json")).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join("edited.json");
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--tol", "-1", "verify", net("fig4a.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("rd-closed-form"));
}

#[test]
fn bad_row_sum_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited(dir.path(), |v| v["cpts"][1]["rows"][0] = serde_json::json!([0.9, 0.3]));
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("row sum 1.2"), "{}", stderr(&out));
}

#[test]
fn missing_cpt_names_the_variable() {
    let dir = tempfile::tempdir().unwrap();
    let path = edited(dir.path(), |v| {
        v["cpts"].as_array_mut().unwrap().pop();
    });
    let out = run(&["entropy", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("schema error") && err.contains("X2"), "{err}");
}

#[test]
fn missing_file_fails() {
    let out = run(&["verify", "/nonexistent/net.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn binary_closed_form() {
    let out = run(&["rd-closed-form", "binary", "--p", "0.1", "--D", "0.05"]);
    assert!(out.status.success());
    let r: f64 = stdout(&out).trim().parse().unwrap();
    assert!((r - 0.182599).abs() < 5e-6, "{r}");
}

#[test]
fn bundled_networks_verify() {
    for name in ["fig4a.json", "fig4b.json", "scene.json"] {
        let out = run(&["verify", net(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
}

#[test]
fn encode_decode_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scene = net("scene.json");
    let scene = scene.to_str().unwrap();
    let samples = dir.path().join("samples.csv");
    let stream = dir.path().join("stream.bin");
    let decoded = dir.path().join("decoded.csv");
    let s = samples.to_str().unwrap();

    assert!(run(&["sample", scene, "--seed", "3", "--n", "500", "-o", s])
        .status
        .success());
    let out = run(&["encode", scene, s, "-o", stream.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&[
        "decode",
        scene,
        stream.to_str().unwrap(),
        "-o",
        decoded.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(&samples).unwrap(),
        fs::read_to_string(&decoded).unwrap()
    );

    // A stream is tied to the network it was encoded with.
    let out = run(&["decode", net("fig4a.json").to_str().unwrap(), stream.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rd_csv_shape() {
    let out = run(&[
        "rd",
        net("fig4a.json").to_str().unwrap(),
        "--vars",
        "X1",
        "--points",
        "5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("slope_X1,rate_bits,D_X1,converged,iterations"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn lemma2_on_the_fork() {
    let out = run(&[
        "lemma2",
        net("fig4a.json").to_str().unwrap(),
        "--side",
        "Y",
        "--targets",
        "0.05,0.05",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}
