use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sqswap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqswap")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = sqswap(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn prepare_reports_schmidt_bound() {
    let v = json(&["prepare", "--n", "10"]);
    assert!((v["max_lambda1"].as_f64().unwrap() - 0.625).abs() < 1e-9);
    assert_eq!(v["support"]["spin_zero"], true);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["n"], 10);

    let v = json(&["prepare", "--n", "2"]);
    assert!((v["max_lambda1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn odd_register_is_a_config_error() {
    let out = sqswap(&["prepare", "--n", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("even N required"));
}

#[test]
fn bad_flags_are_config_errors() {
    assert_eq!(sqswap(&["witness", "--method", "tomography"]).status.code(), Some(2));
    assert_eq!(sqswap(&["sweep", "--figure", "fig9"]).status.code(), Some(2));
    assert_eq!(sqswap(&["witness", "--method", "fidelity", "--shots", "10"]).status.code(), Some(2));
    assert_eq!(sqswap(&["witness", "--method", "fidelity", "--p-sf", "1.5"]).status.code(), Some(2));
}

#[test]
fn witness_methods_give_expected_verdicts() {
    let v = json(&["witness", "--method", "fidelity"]);
    assert_eq!(v["report"]["verdict"], "gme");
    assert!((v["report"]["derived"]["fidelity_bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let v = json(&["witness", "--method", "fidelity", "--p-white", "0.075"]);
    assert_eq!(v["report"]["verdict"], "boundary");
    assert!((v["report"]["derived"]["fidelity_bound"].as_f64().unwrap() - 0.625).abs() < 1e-9);

    let v = json(&["witness", "--method", "homogeneous"]);
    assert_eq!(v["report"]["verdict"], "fully_entangled");
    assert!((v["report"]["derived"]["gamma_whole"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((v["report"]["derived"]["gamma[0,1]"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = sqswap(&[
            "witness", "--method", "homogeneous", "--n", "6", "--p-sf", "0.97", "--shots", "500", "--seed", "11", "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

fn crossing(sidecar: &Path, subset: &str) -> Option<f64> {
    let v: Value = serde_json::from_slice(&std::fs::read(sidecar).unwrap()).unwrap();
    v["table"]["crossings"][subset].as_f64()
}

#[test]
fn fig5a_sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5a.csv");
    let out = sqswap(&["sweep", "--figure", "fig5a", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("param,value,subset,witness_value,stderr\n"));
    let c = crossing(&dir.path().join("fig5a.csv.json"), "[0,1,2,3,4,5]").unwrap();
    assert!((c - 0.95).abs() < 0.01, "{c}");
}

#[test]
fn hubbard_sweep_contains_fast_gate() {
    let out = sqswap(&["sweep", "--figure", "hubbard"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["v_over_j", "t", "gate_fidelity", "leakage"]);
    let v_fast = 4.0 / 3f64.sqrt();
    let hit = rdr.records().map(|r| r.unwrap()).any(|r| {
        let v: f64 = r[0].parse().unwrap();
        let t: f64 = r[1].parse().unwrap();
        let f: f64 = r[2].parse().unwrap();
        (v - v_fast).abs() < 1e-12 && (t - std::f64::consts::PI / (v * 1.0)).abs() < 1e-12 && f >= 0.999
    });
    assert!(hit);
}
