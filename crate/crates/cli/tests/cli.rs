use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use taut_core::{parse_triangulation, serialize};

const FIG8: &str = "cPcbbbiht_12";
const LONG: &str = "dLQacccjsnk_200";

fn taut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taut"))
        .args(args)
        .env("TAUT_JOBS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn figure_eight_passes() {
    let out = taut(&["validate", FIG8]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], "taut/1");
    assert_eq!(v["records"][0]["verdict"], "PASS");
}

#[test]
fn corrupted_document_names_its_axiom() {
    let mut doc: Value = serde_json::from_str(&serialize(&parse_triangulation(FIG8).unwrap())).unwrap();
    // both top faces of tetrahedron 0 on the same pair as its bottom
    doc["coorientations"][0] = serde_json::json!([0, 0]);
    let path = scratch("corrupt.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = taut(&["validate", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let v = json(&out);
    assert_eq!(v["records"][0]["verdict"], "FAIL");
    let axiom = v["records"][0]["axiom"].as_str().unwrap();
    assert!(!axiom.is_empty() && axiom != "parse", "{axiom}");
}

#[test]
fn empty_file_is_an_empty_success() {
    let path = scratch("empty.txt");
    std::fs::write(&path, "").unwrap();
    let out = taut(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&out)["records"].as_array().unwrap().len(), 0);
}

#[test]
fn unfilled_report_has_no_euler_class() {
    let out = taut(&["report", FIG8]);
    assert!(out.status.success());
    let r = &json(&out)["records"][0]["result"];
    assert!(r.get("euler").is_none());
    assert_eq!(r["homology"]["unfilled"], "Z");
}

#[test]
fn filled_report_gives_the_face_codimension() {
    let out = taut(&["report", "--longitude", LONG]);
    assert!(out.status.success());
    let r = &json(&out)["records"][0]["result"];
    assert!(r.get("euler").is_some());
    assert_eq!(r["face_codim"], r["directions"]["lineality_dim"]);
    for s in r["samples"].as_array().unwrap() {
        assert_eq!(s["carried"]["norm_equals_euler_pairing"], true);
        assert_eq!(s["norm"].as_str().unwrap(), s["carried"]["minus_chi"].to_string());
    }
}

#[test]
fn two_prong_fillings_are_rejected_up_front() {
    let out = taut(&["report", "--fill", "0=1/0", FIG8]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("prongs"));
}

#[test]
fn batches_keep_input_order() {
    let recs = ["eLMkbcddddedde_2100", FIG8, LONG, "cPcbbbdxm_10"];
    let path = scratch("batch.txt");
    std::fs::write(&path, recs.join("\n")).unwrap();
    let out = taut(&["cone", path.to_str().unwrap()]);
    let v = json(&out);
    let ids: Vec<&str> = v["records"].as_array().unwrap().iter().map(|b| b["id"].as_str().unwrap()).collect();
    assert_eq!(ids, recs);
}

#[test]
fn norm_and_carry_agree() {
    let n = json(&taut(&["norm", LONG, "--class", "2"]));
    let c = json(&taut(&["carry", LONG, "--class", "2"]));
    let norm = &n["records"][0]["result"][0];
    assert_eq!(norm["source"], "carried");
    assert_eq!(norm["norm"].as_str().unwrap(), c["records"][0]["result"]["minus_chi"].to_string());
    let outside = taut(&["carry", LONG, "--class", "-2"]);
    assert!(!outside.status.success());
}

#[test]
fn scramble_zero_makes_no_moves() {
    let v = json(&taut(&["moves", "scramble", FIG8, "-k", "0"]));
    assert_eq!(v["log"].as_array().unwrap().len(), 0);
    assert_eq!(v["carried"], true);
}

#[test]
fn saved_states_replay_to_the_same_result() {
    let path = scratch("scrambled.json");
    let out = taut(&["moves", "scramble", FIG8, "--seed", "0", "-k", "5", "--emit-state", path.to_str().unwrap()]);
    assert!(out.status.success());
    let first = json(&out);
    assert_eq!(first["scramble"]["seed"], 0);
    assert_eq!(first["carried"], true);
    let again = json(&taut(&["moves", "simplify", "--state", path.to_str().unwrap()]));
    assert_eq!(again["log"], first["log"]);
    assert_eq!(again["final_weights"], first["final_weights"]);
    let class = first["scramble"]["class"].clone();
    let carried = json(&taut(&["carry", FIG8, "--class", class[0].as_str().unwrap()]));
    assert_eq!(first["final_weights"], carried["records"][0]["result"]["weights"]);
}
