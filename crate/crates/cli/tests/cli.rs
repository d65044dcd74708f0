use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn fvring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvring"))
        .args(args)
        .env_remove("FV_MAX_DEPTH")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn schema(name: &str) -> JSONSchema {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "schemas", &format!("{name}.schema.json")].iter().collect();
    let text = std::fs::read_to_string(&path).expect("schema file");
    let value: Value = serde_json::from_str(&text).expect("schema is JSON");
    JSONSchema::compile(&value).expect("schema compiles")
}

/// Runs a JSON subcommand, validates the output and returns it with the exit code.
fn json_run(name: &str, args: &[&str]) -> (Value, i32) {
    let out = fvring(args);
    let value: Value = serde_json::from_str(&stdout(&out)).expect("stdout is JSON");
    let compiled = schema(name);
    if let Err(errors) = compiled.validate(&value) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} output does not match its schema: {msgs:?}");
    }
    (value, out.status.code().expect("exit code"))
}

#[test]
fn atoms_of_z6() {
    let out = fvring(&["atoms", "--ring", "zmod:6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("idempotents: 0, 1, 3, 4"), "{text}");
    assert!(text.contains("atoms: 3, 4"), "{text}");
    assert!(text.contains("≅ Z/2") && text.contains("≅ Z/3"), "{text}");

    let (v, code) = json_run("atoms", &["atoms", "--ring", "zmod:6", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(v["atoms"], serde_json::json!(["3", "4"]));
    let structures: Vec<&str> = v["stalks"].as_array().unwrap().iter().map(|s| s["structure"].as_str().unwrap()).collect();
    assert_eq!(structures, ["Z/2", "Z/3"]);
}

#[test]
fn translate_atomic_formula() {
    let (v, code) = json_run("translate", &["translate", "--formula", "x0 = 0", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["cell_count"], 2);
    assert_eq!(v["cells"].as_array().unwrap().len(), 2);
    assert_eq!(v["psi"], "y0 = 1");
    let (same, _) = json_run("translate", &["translate", "--formula", "x0 = 0", "--format", "json"]);
    assert_eq!(v, same);
}

#[test]
fn check_default_suite_on_z6() {
    let out = fvring(&["check", "--ring", "zmod:6", "--formula-suite", "default-depth2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("8156 formulas"), "{text}");
    assert!(text.ends_with("verdict: PASS\n"), "{text}");
}

#[test]
fn check_json_is_deterministic_and_valid() {
    let args = [
        "check", "--ring", "zmod:12", "--ring", "product:zmod:2,zmod:3", "--sample", "150", "--seed", "7", "--format", "json",
    ];
    let (v, code) = json_run("check", &args);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["formulas"], 150);
    let first = fvring(&args);
    let second = fvring(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn check_reports_skipped_formulas_as_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.txt");
    std::fs::write(&path, "# deep\nx0 = x1\nE x0. E x1. E x2. E x3. x0 = x1\n").unwrap();
    let out = fvring(&["check", "--ring", "zmod:4", "--formula-suite", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("exceeds the cap 3"));
    // Raising the depth cap moves the refusal to the cell cap.
    let relaxed = fvring(&["check", "--ring", "zmod:4", "--formula-suite", path.to_str().unwrap(), "--max-depth", "4"]);
    assert_eq!(relaxed.status.code(), Some(1));
    assert!(stdout(&relaxed).contains("too many cells"));
}

#[test]
fn depth_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fvring"))
        .args(["translate", "--formula", "E x0. E x1. x0 = x1"])
        .env("FV_MAX_DEPTH", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap"));
}

#[test]
fn eval_reports_both_evaluations() {
    let (v, code) = json_run(
        "eval",
        &["eval", "--ring", "product:zmod:2,zmod:3", "--formula", "x0 * x1 = x1", "--assign", "x0=(1,2),x1=(0,1)", "--format", "json"],
    );
    assert_eq!(code, 0);
    assert_eq!(v["direct"], false);
    assert_eq!(v["fv"], false);
    let out = fvring(&["eval", "--ring", "zmod:6", "--formula", "E x1. x0 * x1 = 1", "--assign", "x0=5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("direct: true"));
}

#[test]
fn parse_output() {
    let (v, code) = json_run("parse", &["parse", "A x0. x0 * x0 * x0 = x0", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(v["quantifier_depth"], 1);
    assert_eq!(v["free_variables"], serde_json::json!([]));
    assert_eq!(v["canonical"], "~(E x0. ~(x0 * x0 * x0 = x0))");
}

#[test]
fn axioms_pass_on_z6() {
    let (v, code) = json_run("axioms", &["axioms", "--ring", "zmod:6", "--budget", "40", "--format", "json"]);
    assert_eq!(code, 0);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 8);
    assert!(reports.iter().all(|r| r["verdict"] == "pass"));
    assert_eq!(reports[0], serde_json::json!({"ring": "Z/6", "axiom": "1", "instances": 3, "verdict": "pass"}));
}

#[test]
fn equiv_of_residue_ring_and_product() {
    let (v, code) = json_run(
        "equiv",
        &["equiv", "--left", "zmod:60", "--right", "product:zmod:4,zmod:3,zmod:5", "--sentences", "default-sentences", "--format", "json"],
    );
    assert_eq!(code, 0);
    assert_eq!(v["sentences"].as_array().unwrap().len(), 30);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    std::fs::write(&path, "1 + 1 = 0\nA x0. x0 * x0 = x0\n").unwrap();
    let out = fvring(&["equiv", "--left", "zmod:4", "--right", "product:zmod:2,zmod:2", "--sentences", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("DISAGREE"));
}

#[test]
fn usage_and_input_errors_exit_2() {
    for args in [
        vec!["atoms", "--ring", "zmod:x"],
        vec!["atoms", "--ring", "ring:6"],
        vec!["parse", "x0 = = 1"],
        vec!["eval", "--ring", "zmod:6", "--formula", "x0 = 0", "--assign", "x0=1,x2=3"],
        vec!["eval", "--ring", "zmod:6", "--formula", "x0 = x1", "--assign", "x0=1"],
        vec!["eval", "--ring", "zmod:6", "--formula", "x0 = 0", "--assign", "x0=9"],
        vec!["check", "--ring", "zmod:6", "--formula-suite", "no-such-suite"],
        vec!["check", "--ring", "zmod:6", "--max-depth", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = fvring(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}
