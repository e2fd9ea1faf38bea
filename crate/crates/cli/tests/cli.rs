use std::path::Path;
use std::process::{Command, Output};

use minvar::weierstrass::{enneper_polys, SurfaceDescriptor};
use serde_json::Value;

fn minvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minvar")).args(args).output().expect("spawn minvar")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn validate_exit_codes() {
    let ok = minvar(&["validate", "--catalog", "enneper", "--k", "1", "--r", "0.8"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(json(&ok)["schema"], 1);
    assert_eq!(json(&ok)["command"], "validate");

    // the Gauss map of the closed unit disk meets a critical point of the scaling
    let boundary = minvar(&["validate", "--catalog", "enneper", "--k", "1", "--r", "1.0"]);
    assert_eq!(code(&boundary), 2);

    let usage = minvar(&["validate", "--catalog", "nonsense"]);
    assert_eq!(code(&usage), 1);
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{ \"catalog\": \"enneper\", ").unwrap();
    let out = minvar(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);

    std::fs::write(&cfg, r#"{ "catalog": "enneper", "unknown_key": 3 }"#).unwrap();
    assert_eq!(code(&minvar(&["validate", "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{ "catalog": "enneper", "k": 1, "r": 0.8, "m_min": 1, "m_max": 2 }"#).unwrap();
    let out = minvar(&["destab", "--config", cfg.to_str().unwrap(), "--r", "1.2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["config"]["m_max"], 2);
    assert_eq!(v["unstable"], true);
}

#[test]
fn empty_mode_range_is_rejected() {
    let out = minvar(&["destab", "--catalog", "enneper", "--r", "0.8", "--m-min", "3", "--m-max", "2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn destab_finds_the_first_mode() {
    let out = minvar(&["destab", "--catalog", "enneper", "--k", "1", "--r", "1.2", "--m-min", "1", "--m-max", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["first_destabilizing"], 1);
}

#[test]
fn index_of_a_pair_is_zero() {
    let out = minvar(&["index", "--catalog", "pair", "--k", "2", "--r", "1.5", "--max-m", "8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["index"], 0);
}

#[test]
fn surface_descriptor_matches_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let desc = SurfaceDescriptor { label: "enneper".into(), n: 3, polys: enneper_polys(1).unwrap().to_vec(), r: 1.2 };
    let path = dir.path().join("s.json");
    std::fs::write(&path, serde_json::to_string(&desc).unwrap()).unwrap();
    let a = json(&minvar(&["index", "--surface", path.to_str().unwrap()]));
    let b = json(&minvar(&["index", "--catalog", "enneper", "--r", "1.2"]));
    assert_eq!(a["index"], 1);
    assert_eq!(a["index"], b["index"]);
}

#[test]
fn output_file_replaces_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    std::fs::write(&path, "stale").unwrap();
    let out = minvar(&["validate", "--catalog", "enneper", "--r", "0.5", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "validate");
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1, "temporary file left behind");
}

fn obj_vertices(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| l.starts_with("v ")).count()
}

#[test]
fn mesh_writes_obj() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.obj");
    let out = minvar(&["mesh", "--catalog", "enneper", "--r", "1.2", "--nr", "16", "--ntheta", "32", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    // centre plus one ring per radial step
    assert_eq!(obj_vertices(&path), 1 + 16 * 32);
    let v = json(&out);
    assert_eq!(v["command"], "mesh");
}

#[test]
fn mesh_without_output_is_rejected() {
    assert_eq!(code(&minvar(&["mesh", "--catalog", "enneper", "--r", "0.8"])), 1);
}

#[test]
fn schwarz_on_a_pair_is_unsupported() {
    assert_eq!(code(&minvar(&["schwarz", "--catalog", "pair", "--k", "1", "--r", "1.0"])), 2);
}

#[test]
fn nmi_rejects_beltrami_bound_outside_unit_interval() {
    let out = minvar(&[
        "nmi", "--catalog", "enneper", "--r", "0.8", "--mode", "finite", "--trials", "2", "--mu-sup", "1.5",
    ]);
    assert_eq!(code(&out), 1);
}
