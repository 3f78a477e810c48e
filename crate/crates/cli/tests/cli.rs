use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn cartan(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cartan")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_ok(args: &[&str]) -> Value {
    let (code, out, err) = cartan(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn without_metadata(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("metadata");
    v
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const BALL2: &str = r#"{"type": "ball", "center": [0, 0], "radius": 1}"#;
const SQUARE: &str = r#"{"type": "vpolytope", "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}"#;

#[test]
fn closed_form_ball() {
    let dir = tempfile::tempdir().unwrap();
    let ball = write(dir.path(), "ball2.json", BALL2);
    let v = json_ok(&["intrinsic", "--body", &ball, "--method", "closed"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "intrinsic");
    let values: Vec<f64> = v["result"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_f64().unwrap())
        .collect();
    let pi = std::f64::consts::PI;
    assert_eq!(values, vec![1.0, pi, pi]);
}

#[test]
fn steiner_fit_of_the_square() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "square.json", SQUARE);
    let csv = dir.path().join("v.csv");
    let v = json_ok(&[
        "intrinsic", "--body", &sq, "--method", "steiner", "--eps", "0.1:1.0:10", "--samples", "1e5", "--seed", "7",
        "--csv", csv.to_str().unwrap(),
    ]);
    let v1 = v["result"]["values"][1]["value"].as_f64().unwrap();
    assert!((v1 - 2.0).abs() < 0.04, "{v1}");
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("j,value,std_error,provenance\n"));
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(dir.path(), "square.json", SQUARE);
    let cases: &[&[&str]] = &[
        &["intrinsic", "--body", &sq, "--method", "steiner", "--samples", "1e5"],
        &["intrinsic", "--body", &sq, "--method", "closed", "--samples", "0", "--seed", "1"],
        &["cj", "--n", "7"],
        &["cj", "--n", "5", "--method", "weyl", "--seed", "1"],
        &["cj", "--n", "2", "--j", "3", "--seed", "1"],
        &["lemma-check", "--trials", "0", "--seed", "5"],
        &["lemma-check", "--trials", "10"],
        &["intrinsic", "--body", "/does/not/exist.json"],
        &["intrinsic", "--body", r#"{"type": "ball", "center": [0], "radius": -1}"#],
        &["kinematic", "--M", BALL2, "--L", SQUARE, "--seed", "1", "--samples", "1e6x"],
    ];
    for args in cases {
        let (code, _, err) = cartan(args);
        assert_eq!(code, 2, "{args:?}: {err}");
    }
}

#[test]
fn numerical_failures_exit_3() {
    let (code, _, err) = cartan(&[
        "intrinsic",
        "--body",
        r#"{"type": "ellipsoid", "center": [0, 0], "semiaxes": [1e32, 1]}"#,
    ]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn output_is_deterministic_across_threads_and_runs() {
    let base = ["cj", "--n", "2", "--method", "both", "--samples", "2e4", "--seed", "11"];
    let a = json_ok(&base);
    let mut args = base.to_vec();
    args.extend(["--threads", "3"]);
    let b = json_ok(&args);
    assert_eq!(without_metadata(a.clone()), without_metadata(b.clone()));
    assert_eq!(b["metadata"]["threads"], 3);
    let c = json_ok(&base);
    assert_eq!(
        serde_json::to_string(&without_metadata(a)).unwrap(),
        serde_json::to_string(&without_metadata(c)).unwrap()
    );
}

#[test]
fn shard_count_is_recorded_and_changes_streams() {
    let base = ["lemma-check", "--trials", "60", "--seed", "2"];
    let a = json_ok(&base);
    assert_eq!(a["shard_plan"]["shards"], 64);
    let mut args = base.to_vec();
    args.extend(["--shards", "4"]);
    let b = json_ok(&args);
    assert_eq!(b["shard_plan"]["shards"], 4);
    assert_eq!(b["result"]["disagreements"], 0);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ball2.json", BALL2);
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"body": "ball2.json", "method": "steiner", "samples": "2e4", "seed": 4, "shards": 8}"#,
    );
    let from_file = json_ok(&["intrinsic", "--config", &cfg]);
    assert_eq!(from_file["config"]["method"], "steiner");
    assert_eq!(from_file["config"]["seed"], 4);
    assert_eq!(from_file["shard_plan"]["shards"], 8);
    let overridden = json_ok(&["intrinsic", "--config", &cfg, "--method", "closed", "--shards", "2"]);
    assert_eq!(overridden["config"]["method"], "closed");
    assert_eq!(overridden["shard_plan"]["shards"], 2);

    let bad = write(dir.path(), "bad.json", r#"{"n": 2, "seed": 1, "smaples": 10}"#);
    assert_eq!(cartan(&["cj", "--config", &bad]).0, 2);
}

#[test]
fn cache_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = ["cj", "--n", "2", "--samples", "1e4", "--seed", "9", "--cache", cache.to_str().unwrap()];
    let first = json_ok(&args);
    assert_eq!(first["result"]["routes"]["direct"]["cached"], false);
    let entry: Value =
        serde_json::from_str(&std::fs::read_to_string(cache.join("c_n2_j2_direct_seed9.json")).unwrap()).unwrap();
    for key in ["n", "j", "method", "mean", "std_error", "samples", "seed"] {
        assert!(entry.get(key).is_some(), "{key}");
    }
    let second = json_ok(&args);
    assert_eq!(second["result"]["routes"]["direct"]["cached"], true);
    assert_eq!(first["result"]["routes"]["direct"]["c"], second["result"]["routes"]["direct"]["c"]);
}

#[test]
fn kinematic_reports_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("k.csv");
    let v = json_ok(&[
        "kinematic", "--group", "so", "--phi", "chi", "--M", BALL2, "--L", BALL2, "--samples", "2e4", "--seed", "3",
        "--csv", csv.to_str().unwrap(),
    ]);
    let r = &v["result"]["report"];
    assert!(r["discrepancy_sigma"].as_f64().unwrap() < 4.0);
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("j,c_j,phi_coeff,V_j,term,std_error\n"));
    assert_eq!(table.lines().count(), 4);

    let v = json_ok(&["kinematic", "--phi", "vn", "--M", BALL2, "--L", BALL2, "--samples", "5e3", "--seed", "3"]);
    let oracle = v["result"]["fubini"]["oracle"].as_f64().unwrap();
    assert!((oracle - std::f64::consts::E * std::f64::consts::PI.powi(2)).abs() < 1e-12);
}

#[test]
fn lemma_check_on_given_polygons() {
    let tri = r#"{"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]}"#;
    let v = json_ok(&["lemma-check", "--trials", "200", "--seed", "5", "--M", SQUARE, "--L", tri]);
    assert_eq!(v["result"]["trials"], 200);
    assert_eq!(v["result"]["disagreements"], 0);
    assert_eq!(v["result"]["pass"], true);
    assert_eq!(cartan(&["lemma-check", "--seed", "5", "--M", SQUARE]).0, 2);
}
