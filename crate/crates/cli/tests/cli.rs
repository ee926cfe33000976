use std::path::PathBuf;
use std::process::Command;

use kdist::certificate::BoundCertificate;
use kdist::search::SearchResult;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn kdist(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kdist"))
        .args(args.iter().map(|a| if a.ends_with(".json") { data(a).into_os_string() } else { a.into() }))
        .output()
        .expect("run kdist");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let stderr = String::from_utf8(out.stderr).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value, stderr)
}

fn golden(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

#[test]
fn bound_on_grid_is_tight() {
    let (code, v, _) = kdist(&["bound", "--norm", "linf2.json", "--points", "grid3x3.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["claimed"], "9");
    assert_eq!(v["observed"], 9);
    assert_eq!(v["pass"], true);
    assert_eq!(v["bound"], "grid_heights");
    assert_eq!(v, golden("bound_grid3x3.expected.json"));
}

#[test]
fn bound_on_hexagon_triangle() {
    let (code, v, _) = kdist(&["bound", "--norm", "hex.json", "--points", "tri.json"]);
    assert_eq!(code, 0);
    assert_eq!((v["claimed"].as_str(), v["observed"].as_u64()), (Some("4"), Some(3)));
    assert_eq!(v["bound"], "planar_quadrants");
    assert_eq!(v, golden("bound_tri.expected.json"));
}

#[test]
fn bound_in_three_dimensions_uses_the_cover_bound() {
    let (code, v, _) = kdist(&["bound", "--norm", "l2_3.json", "--points", "simplex3.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["bound"], "cone_cover");
    assert_eq!(v["k"], 2);
    assert_eq!(v["claimed"], "64");
}

#[test]
fn certificate_round_trips() {
    let (_, v, _) = kdist(&["bound", "--norm", "hex.json", "--points", "tri.json"]);
    let cert: BoundCertificate = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&cert).unwrap(), v);
}

#[test]
fn single_point_has_no_distances() {
    let (code, v, _) = kdist(&["spectrum", "--points", "single.json", "--norm", "linf1.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["k"], 0);
    assert_eq!(v["witness"], Value::Null);
}

#[test]
fn spectrum_of_grid() {
    let (code, v, _) = kdist(&["spectrum", "--norm", "linf2.json", "--points", "grid3x3.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["k"], 2);
    assert_eq!(v["spectrum"]["multiplicities"], serde_json::json!([20, 16]));
    assert_eq!(v["witness"]["count"], 2);
}

#[test]
fn malformed_json_exits_one() {
    let (code, v, err) = kdist(&["spectrum", "--norm", "linf2.json", "--points", "malformed.json"]);
    assert_eq!(code, 1);
    assert_eq!(v, Value::Null);
    assert!(err.contains("malformed JSON"), "{err}");
}

#[test]
fn missing_file_and_bad_arguments_exit_one() {
    assert_eq!(kdist(&["spectrum", "--norm", "nope.json", "--points", "tri.json"]).0, 1);
    assert_eq!(kdist(&["spectrum", "--norm", "linf2.json"]).0, 1);
    assert_eq!(kdist(&["frobnicate"]).0, 1);
    assert_eq!(kdist(&["spectrum", "--norm", "linf1.json", "--points", "tri.json"]).0, 1);
}

#[test]
fn search_grid_ground() {
    let (code, v, _) = kdist(&["search", "--norm", "linf2.json", "--ground", "ground4x4.json", "--k", "2", "--enumerate-optima"]);
    assert_eq!(code, 0);
    let r: SearchResult = serde_json::from_value(v).unwrap();
    assert_eq!(r.size(), 9);
    assert_eq!(r.optima.unwrap().len(), 4);
    let (_, pruned, _) = kdist(&["search", "--norm", "linf2.json", "--ground", "ground4x4.json", "--k", "2", "--use-bound-pruning"]);
    assert_eq!(pruned["best"], serde_json::to_value(&r.best).unwrap());
}

#[test]
fn chains_and_decompose() {
    let (code, v, _) = kdist(&["chains", "--norm", "linf2.json", "--points", "grid3x3.json"]);
    assert_eq!(code, 0);
    assert_eq!((v["h"].as_u64(), v["bound"].as_u64()), (Some(2), Some(9)));

    let (code, v, _) = kdist(&["decompose", "--norm", "linf1.json", "--points", "clusters.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["threshold"]["threshold"], 1);
    assert_eq!(v["trace"]["certified"], "16");

    let (code, v, _) = kdist(&["decompose", "--norm", "linf2.json", "--points", "tri.json", "--mc-samples", "20000"]);
    assert_eq!(code, 0);
    assert_eq!(v["monte_carlo"]["exact_v"], 3.0);
}

#[test]
fn normalize_hexagon() {
    let (code, v, _) = kdist(&["normalize2d", "--norm", "hex.json"]);
    assert_eq!(code, 0);
    let checks = &v["normalization"]["checks"];
    assert_eq!(checks["inside_square"], true);
    assert_eq!(checks["contains_cross_polytope"], true);
    assert_eq!(checks["single_quadrant_edges"], true);
}

#[test]
fn conecover_is_reproducible() {
    let args = ["conecover", "--norm", "l1_2.json", "--samples", "2000", "--fresh", "200", "--trials", "50", "--seed", "3"];
    let (code, a, _) = kdist(&args);
    assert_eq!(code, 0);
    assert_eq!(a["cover"]["unassigned"], 0);
    assert!(a["packing"]["m"].as_u64().unwrap() <= 20);
    let (_, b, _) = kdist(&args);
    assert_eq!(a, b);
}

#[test]
fn selftest_prints_ten_passing_rows() {
    let out = Command::new(env!("CARGO_BIN_EXE_kdist")).arg("selftest").output().unwrap();
    let table = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{table}");
    assert_eq!(table.lines().filter(|l| l.starts_with("PASS")).count(), 10, "{table}");
}
