use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn katetov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_katetov")).args(args).env_remove("KATETOV_SCENARIO_DIR").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("katetov-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rational(v: &Value) -> (String, String) {
    (v["num"].as_str().unwrap().to_string(), v["den"].as_str().unwrap().to_string())
}

#[test]
fn construct_depth_three() {
    let o = katetov(&["construct", "--depth", "3"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["result"]["partition"]["bounds"], json!(["0", "1", "3", "27"]));
    let rs: Vec<_> = r["result"]["partition"]["rationals"].as_array().unwrap().iter().map(rational).collect();
    let want = [("1", "1"), ("1", "2"), ("1", "8"), ("1", "192")];
    assert_eq!(rs, want.map(|(n, d)| (n.to_string(), d.to_string())));
}

#[test]
fn tampered_partition_fails_small() {
    let dir = scratch("tamper");
    let mut v = report(&katetov(&["construct", "--depth", "3"]));
    v["result"]["partition"]["rationals"][2] = json!({ "num": "1", "den": "1" });
    let path = dir.join("p.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = katetov(&["verify-construction", "--in", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let failures = report(&o)["result"]["failures"].clone();
    assert!(failures.as_array().unwrap().iter().any(|c| c["condition"] == "small" && c["holds"] == json!(false)), "{failures}");
}

#[test]
fn certify_fresh_edited_and_untagged() {
    let dir = scratch("certify");
    let cert = dir.join("c.json");
    assert_eq!(code(&katetov(&["construct", "--depth", "3", "--certificate", cert.to_str().unwrap()])), 0);
    assert_eq!(code(&katetov(&["certify", "--in", cert.to_str().unwrap()])), 0);

    let original: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let mut edited = original.clone();
    edited["result"]["partition"]["rationals"][3]["num"] = json!("2");
    let p = dir.join("edited.json");
    std::fs::write(&p, edited.to_string()).unwrap();
    let o = katetov(&["certify", "--in", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let reason = report(&o)["reason"].as_str().unwrap().to_string();
    assert!(reason.contains("result.partition.rationals[3].num"), "{reason}");

    let mut untagged = original;
    untagged["assumptions"] = json!([{ "tag": "", "statement": "something" }]);
    let p = dir.join("untagged.json");
    std::fs::write(&p, untagged.to_string()).unwrap();
    assert_eq!(code(&katetov(&["certify", "--in", p.to_str().unwrap()])), 2);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(code(&katetov(&["construct", "--depth", "3", "--bogus"])), 2);
    assert_eq!(code(&katetov(&["construct"])), 2);
    assert_eq!(code(&katetov(&["diagonalize", "--scenario", "pw-2b"])), 2);
    assert_eq!(code(&katetov(&["diagonalize", "--scenario", "no-such-scenario", "--stages", "2"])), 2);
    assert_eq!(code(&katetov(&["--help"])), 0);
}

#[test]
fn posdiff_identity_runs_out_of_horizon() {
    assert_eq!(code(&katetov(&["diagonalize", "--scenario", "posdiff-identity", "--stages", "4"])), 3);
    assert_eq!(code(&katetov(&["diagonalize", "--scenario", "posdiff-identity", "--stages", "2"])), 0);
}

#[test]
fn tree_scenarios_report_their_stipulations() {
    let o = katetov(&["diagonalize", "--scenario", "tree-evens"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert!(r["assumption_count"].as_u64().unwrap() >= 1);
    assert_eq!(r["assumptions"].as_array().unwrap().len() as u64, r["assumption_count"].as_u64().unwrap());
}

#[test]
fn membership_in_the_harmonic_ideal() {
    let evens = r#"{"kind":"progression","base":0,"step":2}"#;
    let r = report(&katetov(&["membership", "--ideal", "sum-harmonic", "--set", evens, "--horizon", "100"]));
    assert_eq!(r["result"]["membership"]["answer"], "out");
    assert_eq!(r["result"]["positive"]["answer"], "in");
    let squares = r#"{"kind":"finite","elements":[1,4,9,16]}"#;
    let r = report(&katetov(&["membership", "--ideal", "sum-harmonic", "--set", squares, "--horizon", "100"]));
    assert_eq!(r["result"]["membership"]["answer"], "in");
}

#[test]
fn hindman_search_finds_least_sequence() {
    let set = r#"{"kind":"intervals","intervals":[[1,7]]}"#;
    let o = katetov(&["hindman-search", "--set", set, "--size", "3", "--horizon", "8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["result"]["witness"], json!([1, 2, 3]));
}

#[test]
fn scenario_directory_overrides_bundled() {
    let dir = scratch("scenarios");
    let bundled = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/tree-evens.json")).unwrap();
    let mut v: Value = serde_json::from_str(&bundled).unwrap();
    v["name"] = json!("local-tree");
    v["description"] = json!("a local copy");
    std::fs::write(dir.join("local-tree.json"), v.to_string()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_katetov"))
        .args(["diagonalize", "--scenario", "local-tree"])
        .env("KATETOV_SCENARIO_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&katetov(&["diagonalize", "--scenario", "local-tree"])), 2);
}

#[test]
fn katetov_claims() {
    let claim = |set: &str| {
        format!(r#"{{"claim":"katetov","h":{{"map":"shift","offset":1}},"target":{{"ideal":"sum-harmonic"}},"set":{set},"horizon":50}}"#)
    };
    let cofinite = claim(r#"{"kind":"cofinite","excluded":[0,1,2]}"#);
    assert_eq!(code(&katetov(&["check-reduction", "--claim", &cofinite])), 0);
    // A finite preimage is not in the dual filter.
    let finite = claim(r#"{"kind":"finite","elements":[1,2,3]}"#);
    assert_eq!(code(&katetov(&["check-reduction", "--claim", &finite])), 1);
}

#[test]
fn certificates_are_reproducible() {
    let dir = scratch("repro");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        let o = katetov(&["--seed", "17", "diagonalize", "--scenario", "hindman-case5", "--stages", "4", "--certificate", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn posdiff_collision_is_found() {
    let o = katetov(&["diagonalize", "--scenario", "collision-posdiff"]);
    assert_eq!(code(&o), 0);
    let c = &report(&o)["result"]["collision"];
    assert_eq!(c["collision"], "found");
    assert!(c["label"].is_u64());
}
