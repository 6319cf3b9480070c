//! The `invkit` binary: output, exit status and the JSON report schema.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn invkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invkit")).args(args).output().expect("run invkit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> JSONSchema {
    let text = std::fs::read_to_string(manifest("schema/report.schema.json")).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

/// Runs with `--json` and returns the exit code and the parsed report.
fn with_json(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut full = vec!["--json", path.to_str().unwrap()];
    full.extend_from_slice(args);
    let o = invkit(&full);
    let doc = serde_json::from_str(&std::fs::read_to_string(&path).expect("report written")).unwrap();
    (o.status.code().unwrap(), doc)
}

fn assert_valid(doc: &Value) {
    let schema = schema();
    let msgs: Vec<String> = match schema.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).take(5).collect(),
    };
    panic!("report does not match the schema: {msgs:?}");
}

#[test]
fn eval_on_the_nilpotent_fixture() {
    let input = manifest("fixtures/t1t2t3.json");
    let o = invkit(&["eval", "--expr", "tr(1 2 3)", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n");
    let (code, doc) = with_json(&["eval", "--expr", "tr(1 2 3)", "--input", input.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(doc["report"]["values"][0], serde_json::json!(["2", "0", "0", "0"]));
    assert_valid(&doc);
}

#[test]
fn expand_prints_the_polynomial() {
    let o = invkit(&["expand", "--expr", "tr(1 2)", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x11(1)·x11(2) + 2·x21(1)·x21(2) + x22(1)·x22(2)\n");
    let (_, doc) = with_json(&["expand", "--expr", "tr(1 2)", "--n", "2", "--kind", "general"]);
    assert_eq!(doc["report"]["polynomial"].as_array().unwrap().len(), 4);
    assert_valid(&doc);
}

#[test]
fn separate_reads_tuples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    let a = "[[1,0,0],[0,0,0],[0,0,0]]";
    let z = "[[0,0,0],[0,0,0],[0,0,0]]";
    std::fs::write(&path, format!(r#"{{"n":3,"d":2,"kind":"symmetric","tuples":[[{a},{z}],[{z},{z}]]}}"#)).unwrap();
    let o = invkit(&["separate", "--case", "o3-sym-d2", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "separated by tr(Y1)\n");
    let (_, doc) = with_json(&["separate", "--case", "o3-sym-d2", "--input", path.to_str().unwrap()]);
    assert_valid(&doc);
}

#[test]
fn decompose_with_certificate() {
    let o = invkit(&["--certificate", "decompose", "--target", "tr(1 1 2 2 3 3)"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("tr(Y1^2Y2^2Y3^2) over Q: decomposable\n"), "{text}");
    assert!(text.lines().count() > 2);
    let (code, doc) = with_json(&["--field", "F3", "decompose", "--target", "tr(1 1 2 2 3 3)"]);
    assert_eq!(code, 0);
    assert_eq!(doc["report"]["decomposable"], false);
    assert_valid(&doc);
    let (_, doc) = with_json(&["decompose", "--target", "tr(1 2 1 1 3) + tr(1 1 2 1 3)"]);
    assert_eq!(doc["report"]["decomposable"], true);
    assert_valid(&doc);
}

#[test]
fn search_and_list_sets() {
    let (code, doc) = with_json(&["search-witness", "--case", "gl2", "--f", "det(2)"]);
    assert_eq!(code, 0);
    assert!(doc["report"]["witness"].is_object());
    assert_valid(&doc);
    let (code, doc) = with_json(&["search-witness", "--case", "gl2", "--f", "det(2)", "--budget", "0"]);
    assert_eq!(code, 1, "an exhausted budget is a failed verification");
    assert!(doc["report"]["witness"].is_null());
    assert_valid(&doc);
    let (code, doc) = with_json(&["list-sets"]);
    assert_eq!(code, 0);
    assert_eq!(doc["report"].as_array().unwrap().len(), invkit::invlang::CASE_NAMES.len());
    assert_valid(&doc);
}

#[test]
fn verify_subcommands_validate() {
    for args in [
        &["verify", "theorem", "--case", "o3-sym-d2"][..],
        &["--field", "F5", "verify", "theorem"],
        &["verify", "lemma", "--part", "b"],
        &["--field", "F3", "verify", "lemma", "--part", "d"],
        &["verify", "indecomposable", "--target", "f4"],
        &["--field", "F3", "verify", "indecomposable", "--target", "f2"],
        &["verify", "reduction"],
    ] {
        let (code, doc) = with_json(args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(doc["pass"], true);
        assert_valid(&doc);
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let input = manifest("fixtures/t1t2t3.json");
    let (_, doc) = with_json(&["eval", "--expr", "tr(1 2 3)", "--input", input.to_str().unwrap()]);
    let schema = schema();
    let mut bad = doc.clone();
    bad["report"]["values"][0] = Value::from(-2);
    assert!(!schema.is_valid(&bad));
    let mut bad = doc.clone();
    bad.as_object_mut().unwrap().remove("pass");
    assert!(!schema.is_valid(&bad));
    let (_, mut doc) = with_json(&["verify", "indecomposable", "--target", "f1"]);
    for section in doc["report"].as_array_mut().unwrap() {
        if let Some(runs) = section["report"].get_mut("runs").and_then(Value::as_array_mut) {
            runs[0]["verdict"] = Value::from("probably");
        }
    }
    assert!(!schema.is_valid(&doc));
}

#[test]
fn exit_status_for_bad_input() {
    for args in [
        &["frobnicate"][..],
        &["--field", "F2", "verify", "theorem"],
        &["--field", "F4", "verify", "theorem"],
        &["expand", "--expr", "tr(1 2"],
        &["verify", "theorem", "--case", "gl7"],
        &["eval", "--expr", "tr(1)", "--input", "/nonexistent/input.json"],
        &["decompose", "--target", "tr(1) + tr(1 2)"],
    ] {
        let o = invkit(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = invkit(&["--field", "F2", "verify", "theorem"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("characteristic 2"));
}
