use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_crossed-site"));
    c.env_remove("CROSSED_SITE_MAX_LEVEL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn weyl_level_two_has_order_eight() {
    let out = run(&["weyl", "--site", "aug-delta", "--level", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["order"], 8);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["isomorphism"]["bijective"], true);
}

#[test]
fn weyl_on_the_interval_site_with_confirmation() {
    let out = run(&["weyl", "--site", "nabla", "--level", "2", "--confirm-cap", "6", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["order"], 16);
    assert_eq!(v["confirmed"]["agrees"], true);
}

#[test]
fn table_three_matches_six_rows() {
    let out = run(&["classify", "--table", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["matched"] == true && r["orders_by_level"].is_array() && r["name"].is_string()));
    let failing: Vec<&Value> = v["candidates"].as_array().unwrap().iter().filter(|c| c["interval_closed"] == false).collect();
    assert_eq!(failing.len(), 2);
    assert!(failing.iter().all(|c| c["witness"]["phi"].is_object() || c["witness"]["phi"].is_string()));
}

#[test]
fn truncation_too_low_to_separate_the_rows_is_a_mismatch() {
    let out = run(&["classify", "--table", "2", "--max-level", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn verify_symmetric_on_the_interval_site() {
    let out = run(&["verify", "--family", "sym", "--site", "nabla", "--max-level", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    for (args, flag) in [
        (vec!["verify", "--family", "braid"], "--family"),
        (vec!["verify", "--family", "dihedral", "--site", "nabla"], "--family"),
        (vec!["weyl", "--level", "2", "--probe-cap", "3"], "--probe-cap"),
        (vec!["classify", "--table", "7"], "--table"),
        (vec!["classify", "--table", "2", "--max-level", "6"], "--max-level"),
        (vec!["verify", "--no-such-flag"], "--no-such-flag"),
        (vec!["subgroup-gen", "--elements", "2:999"], "--elements"),
        (vec!["weyl", "--level", "1", "--site", "square"], "--site"),
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(flag), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn malformed_input_files_are_usage_errors() {
    let bad = data("bad_table.json");
    let out = run(&["base-change", "--functor", "J", "--direction", "lan", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--input"));
    let out = run(&["base-change", "--functor", "k", "--direction", "lan", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--functor"));
}

#[test]
fn output_is_deterministic_across_runs_and_thread_counts() {
    let a = run(&["goursat", "--json"]);
    let b = run(&["goursat", "--json", "--threads", "1"]);
    let c = run(&["goursat", "--json", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v = json_of(&a);
    assert_eq!(v["backward_after_forward"], true);
    assert_eq!(v["forward_after_backward"], true);
    assert_eq!(v["failing_candidates"].as_array().unwrap().len(), 2);
}

#[test]
fn output_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("crossed-site-{}.json", std::process::id()));
    let p = path.display().to_string();
    let out = run(&["weyl", "--level", "1", "--json", "--output", &p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["order"], 2);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn max_level_falls_back_to_the_environment() {
    let out = bin().args(["verify", "--family", "cyclic", "--json"]).env("CROSSED_SITE_MAX_LEVEL", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["max_level"], 2);
    assert_eq!(v["results"][0]["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn right_extension_along_j() {
    let out = run(&["base-change", "--functor", "j", "--direction", "ran", "--input", &data("weyl_delta.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["counit_iso"], true);
    assert_eq!(v["result"]["sizes"], serde_json::json!([1, 2, 8, 48]));
}

#[test]
fn left_extension_along_j_has_bijective_unit() {
    for file in ["weyl_delta.json", "idempotent_delta.json"] {
        let out = run(&["base-change", "--functor", "j", "--direction", "lan", "--input", &data(file), "--json"]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let v = json_of(&out);
        assert_eq!(v["result"]["unit_map_bijective"], true);
    }
}

#[test]
fn right_extension_along_the_interval_functor_gives_weyl() {
    let out = run(&["base-change", "--functor", "J", "--direction", "ran", "--input", &data("weyl_times_c2.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["group"]["equals_weyl"], true);
    assert_eq!(v["result"]["sizes"], serde_json::json!([2, 4, 16]));
}

#[test]
fn left_extension_along_the_interval_functor() {
    let out = run(&["base-change", "--functor", "J", "--direction", "lan", "--input", &data("c2_trivial.json"), "--word-cap", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["result"]["confluence"]["ambiguous"].as_array().unwrap().is_empty());
}

#[test]
fn free_monoid_word_counts() {
    let out = run(&["free-monoid", "--cap", "3", "--family", "sym", "--max-level", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let sizes = [1u64, 1, 2, 6];
    for (a, lvl) in v["levels"].as_array().unwrap().iter().enumerate() {
        let n = sizes[a];
        assert_eq!(lvl["words"], 1 + n + n * n + n * n * n);
    }
    assert!(v["levels"][2]["sample"][1]["letters"][0]["level"].is_u64());
}

#[test]
fn rtimes_sizes_multiply() {
    let out = run(&["rtimes", "--left", "sym", "--right", "hyp", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["sizes"], serde_json::json!([1, 2, 16, 288]));
    assert_eq!(v["associative"], true);
}

#[test]
fn subgroup_generated_by_an_endpoint_swap() {
    // index of the full reversal with all signs negative at level 1 of W on nabla
    let w = json_of(&run(&["weyl", "--site", "nabla", "--level", "1", "--elements", "--json"]));
    let elements = w["elements"].as_array().unwrap();
    let idx = elements.iter().position(|e| e["perm"] == serde_json::json!([2, 1, 0]) && e["neg"] == 7).unwrap();
    let arg = format!("1:{idx}");
    let out = run(&["subgroup-gen", "--site", "nabla", "--elements", &arg, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["families"], serde_json::json!(["reflexive"]));
}
