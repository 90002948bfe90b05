use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn gptj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gptj"))
        .args(args)
        .env_remove("GPTJ_SEED")
        .env_remove("GPTJ_MODE")
        .env_remove("GPTJ_TOLERANCE")
        .env_remove("GPTJ_MAX_GROUP")
        .env_remove("GPTJ_TENSOR_CONE")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn square_bit_report_matches_expectations() {
    let f = fixture("square_bit.json");
    let v = json_of(&gptj(&["analyze", f.to_str().unwrap()]));
    assert_eq!(v["properties"]["sharp"]["verdict"], false);
    assert_eq!(v["properties"]["self-dual"]["verdict"], false);
    assert_eq!(v["properties"]["orthogonalizing"]["present"], true);
    assert_eq!(v["model"]["dim"], 3);
}

#[test]
fn qubit_clauses_all_hold() {
    let f = fixture("qubit.json");
    let v = json_of(&gptj(&["analyze", f.to_str().unwrap(), "--properties", "theorem1"]));
    let t = &v["properties"]["theorem1"];
    for c in ["a", "b", "c"] {
        assert_eq!(t[c]["verdict"], true, "clause {c}");
    }
}

#[test]
fn segment_model_is_not_state_complete() {
    let f = fixture("example5.json");
    let v = json_of(&gptj(&["analyze", f.to_str().unwrap(), "--properties", "state-complete"]));
    let sc = &v["properties"]["state-complete"];
    assert_eq!(sc["verdict"], false);
    assert!(sc["witness"].is_object());
}

#[test]
fn text_report_carries_identity_table() {
    let f = fixture("classical3.json");
    let out = gptj(&["analyze", f.to_str().unwrap(), "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("clause | holds | statement"));
    assert!(text.contains("sharp: true [exact]"));
}

#[test]
fn built_specs_match_fixtures() {
    let out = gptj(&["build", "square-bit"]);
    assert!(out.status.success());
    let built: Value = serde_json::from_slice(&out.stdout).unwrap();
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(fixture("square_bit.json")).unwrap()).unwrap();
    assert_eq!(built, stored);
}

#[test]
fn seed_flag_and_env_agree() {
    let f = fixture("qubit.json");
    let flag = gptj(&["--seed", "11", "analyze", f.to_str().unwrap(), "--properties", "self-dual"]);
    let env = Command::new(env!("CARGO_BIN_EXE_gptj"))
        .args(["analyze", f.to_str().unwrap(), "--properties", "self-dual"])
        .env("GPTJ_SEED", "11")
        .output()
        .unwrap();
    assert!(flag.status.success() && env.status.success());
    assert_eq!(flag.stdout, env.stdout);
    assert_eq!(json_of(&flag)["seed"], 11);
}

#[test]
fn float_mode_override() {
    let f = fixture("square_bit.json");
    let v = json_of(&gptj(&["--mode", "float", "analyze", f.to_str().unwrap(), "--properties", "sharp"]));
    assert_eq!(v["arithmetic"], "float");
    assert_eq!(v["properties"]["sharp"]["mode"], "float");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(gptj(&["frobnicate"]).status.code(), Some(1));
    let f = fixture("square_bit.json");
    assert_eq!(gptj(&["analyze", f.to_str().unwrap(), "--properties", "bogus"]).status.code(), Some(1));
    assert_eq!(gptj(&["--mode", "decimal", "analyze", f.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn load_errors_exit_two() {
    assert_eq!(gptj(&["analyze", "/nonexistent/spec.json"]).status.code(), Some(2));
    let bad = scratch("duplicate_labels.json");
    std::fs::write(
        &bad,
        r#"{"specVersion":1,"name":"dup","outcomes":["a","a"],"tests":[["a"]],"states":[{"a":"1"}],
           "group":{"type":"permutations","generators":[]}}"#,
    )
    .unwrap();
    let out = gptj(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outcomes[1]"));
}

#[test]
fn reduce_writes_a_loadable_component() {
    let f = fixture("reducible.json");
    let out_path = scratch("reduced.json");
    let out = gptj(&["reduce", f.to_str().unwrap(), "--component", "1", "-o", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(spec["provenance"]["component"], 1);
    assert_eq!(spec["provenance"]["parent"], "reducible");
    let v = json_of(&gptj(&["analyze", out_path.to_str().unwrap(), "--properties", "irreducible"]));
    assert_eq!(v["properties"]["irreducible"]["verdict"], true);
}

#[test]
fn compose_audits_total_probability() {
    let f = fixture("classical3.json");
    let v = json_of(&gptj(&["compose", f.to_str().unwrap(), fixture("square_bit.json").to_str().unwrap()]));
    assert_eq!(v["totalProbability"]["holds"], true);
    assert_eq!(v["locallyTomographic"], true);
    let v = json_of(&gptj(&["--tensor-cone", "injective", "compose", f.to_str().unwrap(), f.to_str().unwrap()]));
    assert_eq!(v["state"]["tensorCone"], "injective");
}

#[test]
fn conjugate_and_adjoint() {
    let v = json_of(&gptj(&["conjugate", fixture("qubit.json").to_str().unwrap()]));
    assert_eq!(v["isCorrelator"], true);
    assert_eq!(v["isomorphismState"]["verdict"], true);
    let v = json_of(&gptj(&["adjoint", fixture("square_bit.json").to_str().unwrap()]));
    assert_eq!(v["daggerIsInverse"]["verdict"], true);
    assert_eq!(v["generators"].as_array().unwrap().len(), 2);
}

#[test]
fn conjugate_without_orthogonalizing_form_fails_cleanly() {
    let out = gptj(&["conjugate", fixture("reducible.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
