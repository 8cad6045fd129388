use std::process::{Command, Output};

use serde_json::Value;

fn bocce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bocce")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = bocce(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn pettis_of_ex53_member() {
    let v = json(&["pettis", "ex53", "--k", "6"]);
    assert_eq!(v["pettis"]["value"], 0.125);
    assert_eq!(v["pettis"]["method"], "EXACT");
    assert_eq!(v["l1_norm"], 1.0);
}

#[test]
fn bocce_of_ex52_member_on_full_set() {
    let v = json(&["bocce", "ex52", "--k", "3", "--set", "full"]);
    assert_eq!(v["bocce"], 1.0);
}

#[test]
fn tight_ex32_is_not_found() {
    let v = json(&["tight", "ex32", "--prefix", "6", "--eps", "0.5"]);
    let o = &v["outcomes"][0];
    assert_eq!(o["status"], "NOT_FOUND");
    assert_eq!(o["min_escape"], 1.0);
}

#[test]
fn tight_ex34_finds_witnesses() {
    let v = json(&["tight", "ex34", "--prefix", "8"]);
    let outcomes = v["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 6);
    assert!(outcomes.iter().all(|o| o["status"] == "FOUND"));
}

#[test]
fn report_flags_for_spike_and_ex32() {
    let v = json(&["report", "spike", "--prefix", "10"]);
    assert_eq!(v["flags"]["uniformly_integrable"], false);
    assert_eq!(v["flags"]["in_measure"], true);
    let v = json(&["report", "ex32"]);
    assert_eq!(v["flags"]["strong"], false);
    assert_eq!(v["flags"]["limited"], true);
}

#[test]
fn csv_output_has_header() {
    let out = bocce(&["pettis", "ex53", "--k", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("k,metric,value\n3,pettis,0.353553390593\n"));
}

#[test]
fn file_input_matches_gallery() {
    let seq = bocce::gallery::gen_spike(4).unwrap();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("spike4.json");
    std::fs::write(&path, serde_json::to_string(&seq).unwrap()).unwrap();
    let from_file = json(&["bite", path.to_str().unwrap()]);
    let from_name = json(&["bite", "spike", "--prefix", "4"]);
    assert_eq!(from_file["removed_measure"], from_name["removed_measure"]);
    assert_eq!(from_file["removed_measure"][3], 0.0625);
}

#[test]
fn property_command_passes() {
    let v = json(&["property", "--seed", "3", "--count", "5"]);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["failed"], 0, "{c}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(bocce(&["report", "no-such-sequence"]).status.code(), Some(2));
    assert_eq!(bocce(&["report", "ex53", "--prefix", "30"]).status.code(), Some(3));
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(bocce(&["report", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn report_is_deterministic() {
    let a = bocce(&["report", "ex53", "--prefix", "8"]);
    let b = bocce(&["report", "ex53", "--prefix", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
