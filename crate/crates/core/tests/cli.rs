//! End-to-end runs of the `planar` binary.

use std::path::Path;
use std::process::{Command, Output};

fn planar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_model(dir: &Path, name: &str, toml: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, toml).unwrap();
    p.to_str().unwrap().to_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(planar(&[]).status.code(), Some(2));
    assert_eq!(planar(&["reproduce", "nonsense"]).status.code(), Some(2));
    assert_eq!(planar(&["classify", "/no/such/file.toml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_model(dir.path(), "bad.toml", "family = \"lp\"\np = 0.5\n");
    assert_eq!(planar(&["classify", &bad]).status.code(), Some(2));
}

#[test]
fn figure1_reproduces() {
    let out = planar(&["reproduce", "figure1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn failed_assertions_exit_with_one() {
    // The 1/17 profile has vanishing curvature, so its curvature check fails.
    let out = planar(&["reproduce", "grandpa-pig"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn classify_l4_fails_at_e1() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "l4.toml", "family = \"lp\"\np = 4.0\n");
    let out = planar(&["classify", &m]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "planar-norms-report/1");
    assert_eq!(v["result"]["st"]["verdict"], "no");
    assert_eq!(v["result"]["st"]["point"]["x1"], 1.0);
    assert_eq!(v["result"]["st"]["point"]["x2"], 0.0);
}

#[test]
fn euclidean_orbit_is_a_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "e.toml", "family = \"lp\"\np = 2.0\n");
    let out = planar(&["orbit", &m, "--from", "0", "--to", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["outcome"], "certificate");
    assert!(v["result"]["certificate"]["op_norm"].as_f64().unwrap() <= 1.0 + 1e-7);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "m.toml", "family = \"quadrant-mix\"\np = 1.5\nq = 4.0\n");
    let a = planar(&["moduli", &m, "--eps-grid", "0.1,0.5,1.0"]);
    let b = planar(&["moduli", &m, "--eps-grid", "0.1,0.5,1.0"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["result"]["eps_grid"].as_array().unwrap().len(), 3);
}

#[test]
fn curvature_and_render_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_model(dir.path(), "p.toml", "family = \"lp\"\np = 3.0\n");
    let csv = dir.path().join("k.csv");
    let out = planar(&["curvature", &m, "--samples", "64", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 65);
    let svg = std::fs::read_to_string(dir.path().join("p.svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    let out = planar(&["render", &m, "--overlay", "ellipses"]);
    assert_eq!(out.status.code(), Some(0));
    roxmltree::Document::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
}

#[test]
fn nobst_model_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("nobst.toml");
    let out = planar(&["build-nobst", "--depth", "10", "--out", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let k1 = v["result"]["k_at_one"].as_f64().unwrap();
    assert!((k1 - v["result"]["k_at_one_series"].as_f64().unwrap()).abs() < 1e-12);
    let out = planar(&["render", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
