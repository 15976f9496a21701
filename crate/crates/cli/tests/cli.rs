use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_disk-uniform")).args(args).output().expect("run binary")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn preset_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "ring.json");
    assert!(bin(&["preset", "ring_lattice(2)", "--scenario", "orthogonal", "--out", &p]).status.success());
    let out = bin(&["validate", &p]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["vertices"], 19);
    assert_eq!(v["faces"], 24);
    assert_eq!(v["boundary_vertices"], 12);
}

#[test]
fn preset_output_is_byte_stable() {
    let a = bin(&["preset", "hex_inscribed"]);
    let b = bin(&["preset", "hex_inscribed"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_writes_flat_problem() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "hex.json");
    let s = path(dir.path(), "sol.json");
    // start away from the default (already flat) label
    let mut prob: Value = serde_json::from_slice(&bin(&["preset", "hex_orthogonal"]).stdout).unwrap();
    prob["f_init"] = serde_json::json!({ "hat": 1.0 });
    fs::write(&p, prob.to_string()).unwrap();

    let out = bin(&["solve", &p, "--method", "newton", "--out", &s]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&out);
    assert!(rep["iterations"].as_u64().unwrap() > 0);
    assert!((rep["boundary_gap"].as_f64().unwrap() - 0.5 * 3f64.ln()).abs() < 1e-8);

    let k = json(&bin(&["curvature", &s]));
    assert!(k["max_abs"].as_f64().unwrap() <= 1e-10);
    let lay = bin(&["layout", &s, "--scenario", "orthogonal"]);
    assert!(lay.status.success());
    assert_eq!(json(&lay)["boundary"]["passed"], true);
    // wrong scenario is a numerical failure, report still written
    let lay = bin(&["layout", &s, "--scenario", "tangency"]);
    assert_eq!(lay.status.code(), Some(2));
    assert_eq!(json(&lay)["boundary"]["passed"], false);
}

#[test]
fn flow_method_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "tri.json");
    let mut prob: Value = serde_json::from_slice(&bin(&["preset", "triangle"]).stdout).unwrap();
    prob["f_init"] = serde_json::json!({ "hat": 1.2 });
    fs::write(&p, prob.to_string()).unwrap();
    let out = bin(&["solve", &p, "--method", "flow", "--dt", "0.05", "--time", "20"]);
    assert!(out.status.success());
    let rep = json(&out);
    assert_eq!(rep["method"], "flow");
    assert!(rep["max_abs_curvature"].as_f64().unwrap() < rep["initial_residual"].as_f64().unwrap());
}

#[test]
fn render_rank_and_mobius() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "hex.json");
    let svg = path(dir.path(), "hex.svg");
    assert!(bin(&["preset", "hex_tangent", "--out", &p]).status.success());

    assert!(bin(&["render", &p, "--solve", "--out", &svg]).status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml") && text.trim_end().ends_with("</svg>"));

    let r = json(&bin(&["rank", &p]));
    assert_eq!((r["rows"].as_u64(), r["cols"].as_u64()), (Some(26), Some(32)));
    assert_eq!(r["singular_values"].as_array().unwrap().len(), 26);

    let m = json(&bin(&["mobius-check", &p, "--eps", "1e-3", "--seed", "7"]));
    let gens = m["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 7);
    for g in gens {
        assert!(g["max_abs_curvature"].as_f64().unwrap() <= 100.0 * 1e-6);
    }
    let again = json(&bin(&["mobius-check", &p, "--eps", "1e-3", "--seed", "7"]));
    assert_eq!(m, again);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["preset", "dodecahedron"]).status.code(), Some(1));
    assert_eq!(bin(&["validate", &path(dir.path(), "missing.json")]).status.code(), Some(1));
    assert_eq!(bin(&["solve"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));

    let bad = path(dir.path(), "bad.json");
    fs::write(&bad, r#"{"vertices":[0,1,2],"faces":[],"alpha":{},"eta":{},"mu":{}}"#).unwrap();
    let out = bin(&["validate", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no faces"));

    // not flat without --solve
    let p = path(dir.path(), "hex.json");
    let mut prob: Value = serde_json::from_slice(&bin(&["preset", "hex_tangent"]).stdout).unwrap();
    prob["f_init"] = serde_json::json!({ "hat": 1.0 });
    fs::write(&p, prob.to_string()).unwrap();
    assert_eq!(bin(&["layout", &p]).status.code(), Some(2));
    assert!(bin(&["layout", &p, "--solve"]).status.success());
    // inadmissible start
    prob["f_init"] = serde_json::json!({ "hat": -10.0 });
    fs::write(&p, prob.to_string()).unwrap();
    assert_eq!(bin(&["solve", &p]).status.code(), Some(2));
}
