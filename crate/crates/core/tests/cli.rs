use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_growthlab")).args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn no_command_prints_usage() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn grow_reaches_the_cubic_cusp() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("g");
    let out = run(&["grow", "--potential", "monomial", "--n", "3", "--tn", "0.1666666667", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&out_dir.join("grow_summary.json"));
    assert!((s["t_c"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(s["cusps"].as_array().unwrap().len(), 3);
    assert_eq!(s["critical"], Value::Bool(true));
}

#[test]
fn painleve_summary_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["painleve", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let s = json(&dir.path().join("painleve_summary.json"));
    assert!(s["fd_residual_max"].as_f64().unwrap() < 1e-6);
    assert!(s["nu0"].is_null());
    let t = &s["paper_zero_member_taylor"];
    assert!((t["c3"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn errors_are_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["grow", "--potential", "gaussian", "--t2", "0.7", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "domain");
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "scenario = \"grow\"\nbogus = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(serde_json::from_slice::<Value>(&out.stderr).is_ok());
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifests = Vec::new();
    for tag in ["a", "b"] {
        let d = dir.path().join(tag);
        let out = run(&["sample", "--n-eig", "12", "--sweeps", "400", "--seed", "7", "--t2", "0.2", "--out", d.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        manifests.push(std::fs::read(d.join("manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn manifest_lists_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["curve", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let m = json(&dir.path().join("manifest.json"));
    let listed: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    let mut on_disk: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for f in m["files"].as_array().unwrap() {
        let bytes = std::fs::read(dir.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), growthlab::output::sha256_hex(&bytes));
    }
}
