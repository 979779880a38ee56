use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasitoric"))
        .args(args)
        .env("QUASITORIC_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = run(&all);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(&o)))
}

#[test]
fn analyze_reports_dims_and_chordality() {
    let r = report(&["analyze", &data("fix_a.json")]);
    assert_eq!(r["command"], "analyze");
    assert_eq!(r["results"]["m"], 3);
    assert_eq!(r["results"]["n"], 3);
    assert_eq!(r["results"]["size"], 6);
    assert_eq!(r["results"]["doubly_chordal"], true);
    let r = report(&["analyze", &data("c6.json")]);
    assert_eq!(r["results"]["doubly_chordal"], false);
    assert_eq!(r["results"]["witness"]["kind"], "induced-cycle");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\":[2").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    std::fs::write(&bad, r#"{"dims":[2,2],"tuples":[[1,1],[1,1]]}"#).unwrap();
    assert_eq!(run(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn glue_reproduces_fix_b_file() {
    let o = run(&["ctfp", &data("fix_b1.json"), "--glue", &data("fix_b2.json"), "2", "1"]);
    assert!(o.status.success());
    let glued: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let expected: Value = serde_json::from_str(&std::fs::read_to_string(data("fix_b.json")).unwrap()).unwrap();
    assert_eq!(glued, expected);
}

#[test]
fn search_and_factor() {
    let r = report(&["ctfp", &data("fix_b.json"), "--search"]);
    let splits = r["results"]["splits"].as_array().unwrap();
    assert!(splits.iter().any(|s| s["spec"] == serde_json::json!({"j": 2, "inA": [1, 2]})));
    let o = run(&["ctfp", &data("fix_c.json"), "--search"]);
    assert!(stdout(&o).contains("not a cTFP"));
    let r = report(&["ctfp", &data("fix_b.json"), "--factor", "2", "1,2"]);
    let b1: Value = serde_json::from_str(&std::fs::read_to_string(data("fix_b1.json")).unwrap()).unwrap();
    let b2: Value = serde_json::from_str(&std::fs::read_to_string(data("fix_b2.json")).unwrap()).unwrap();
    assert_eq!(r["results"]["s1"], b1);
    assert_eq!(r["results"]["s2"], b2);
    let o = run(&["ctfp", &data("fix_c.json"), "--factor", "1", "1,2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn check_reports_multisets() {
    let r = report(&["ctfp", &data("fix_b.json"), "--check", "1", "1,2"]);
    assert_eq!(r["results"]["frequency_condition"], false);
    assert_eq!(r["results"]["swap_condition"], false);
    let s2 = r["results"]["s2_multiset"].as_array().unwrap();
    let count = |t: [u64; 2]| {
        s2.iter()
            .find(|e| e["tuple"] == serde_json::json!(t))
            .map(|e| e["count"].as_u64().unwrap())
    };
    assert_eq!(count([1, 1]), Some(1));
    assert_eq!(count([1, 3]), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["ctfp", &data("fix_b.json")]).status.code(), Some(2));
    assert_eq!(run(&["ctfp", &data("fix_b.json"), "--check", "4", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["ctfp", &data("fix_b.json"), "--check", "2", "1,9"]).status.code(), Some(2));
}

#[test]
fn reparam_of_fix_d() {
    let r = report(&["reparam", &data("fix_d.json")]);
    let blocks = r["results"]["matrix"]["blocks"].as_array().unwrap();
    let sizes: Vec<usize> = blocks.iter().map(|b| b["rows"].as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![5, 7, 6, 5]);
    assert_eq!(r["results"]["rowspan_equal"], true);
    let checks = r["results"]["internal_ctfp"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["passed"] == true));
    let decomposed = report(&["reparam", &data("fix_d.json"), "--decompose"]);
    assert_eq!(decomposed["results"]["decomposition"].as_array().unwrap().len(), 3);
}

#[test]
fn reparam_notices_and_refusals() {
    let r = report(&["reparam", &data("k22.json")]);
    assert!(r["warnings"][0].as_str().unwrap().contains("coincides with A_S"));
    let o = run(&["reparam", &data("c6.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("6-cycle"));
}

#[test]
fn mle_exact_and_iterative() {
    let r = report(&["mle", &data("fix_d.json"), "--reparam", "--exact", "--counts", "[1,1,1,1,1,1,1,1,1,1,1,1]"]);
    assert_eq!(r["results"]["birch_residual_max_abs"], "0");
    assert_eq!(r["results"]["exact"], true);
    assert_eq!(r["results"]["cycles"], 1);
    let r = report(&["mle", &data("fix_f.json"), "--iterate", "--counts", "[1,2,3,4,5,6,7,8]"]);
    assert_eq!(r["results"]["converged"], true);
    assert!(r["results"]["cycles"].as_u64().unwrap() > 1);
    let o = run(&["mle", &data("fix_d.json"), "--counts", "[0,1,1,1,1,1,1,1,1,1,1,1]"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["mle", &data("fix_d.json"), "--counts", "[1,1]"]);
    assert_eq!(o.status.code(), Some(2));
    let seeded = report(&["mle", &data("fix_d.json"), "--reparam", "--seed", "7"]);
    assert_eq!(seeded["results"]["birch_residual_max_abs"], "0");
}

#[test]
fn lawrence_of_fix_e() {
    let o = run(&["lawrence", &data("fix_e.json")]);
    let text = stdout(&o);
    assert!(text.contains("S' = {(1,1,1), (2,1,2), (2,2,3), (3,1,4), (4,3,1), (5,3,2), (5,4,3), (6,3,4)}"));
    assert!(text.contains("not a cTFP"));
    assert!(text.contains("predicted ML-degree of the lift: 1"));
    assert!(text.contains("open question"));
}

#[test]
fn slices_of_fix_f() {
    let o = run(&["slices", &data("fix_f.json")]);
    assert!(stdout(&o).contains("necessary condition passed - NOT sufficient (known ML-degree 3 counterexample"));
}

#[test]
fn output_is_deterministic_and_out_flag_writes_file() {
    let a = run(&["--json", "reparam", &data("fix_d.json"), "--decompose"]);
    let b = run(&["--json", "reparam", &data("fix_d.json"), "--decompose"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = run(&["--json", "--out", out.to_str().unwrap(), "reparam", &data("fix_d.json"), "--decompose"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

#[test]
fn digest_depends_on_content_only() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.json");
    std::fs::copy(data("fix_a.json"), &copy).unwrap();
    let a = report(&["analyze", &data("fix_a.json")]);
    let b = report(&["analyze", copy.to_str().unwrap()]);
    assert_eq!(a["inputs_digest"], b["inputs_digest"]);
    let c = report(&["analyze", &data("fix_d.json")]);
    assert_ne!(a["inputs_digest"], c["inputs_digest"]);
}
