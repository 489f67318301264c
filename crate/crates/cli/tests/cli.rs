use qcfa::machines::Family;
use qcfa::numerics::rat;
use serde_json::Value;
use std::process::{Command, Output};

fn qcfa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcfa")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn exact_accepts_a_yes_instance_with_certainty() {
    let doc = json(&qcfa(&["exact", "--family", "aeq", "--m", "2", "--eps", "0.25", "--input", "aabb"]));
    assert_eq!(doc["accept"]["value"], "1/1");
    assert_eq!(doc["reject"]["value"], "0/1");
    assert_eq!(doc["strategy"], "closed-form");
    assert_eq!(doc["promise"], "yes");
    for field in ["machine_id", "word", "residual", "expected_steps", "params"] {
        assert!(doc.get(field).is_some(), "{field}");
    }
}

#[test]
fn exact_rejects_a_no_instance_with_high_probability() {
    let doc = json(&qcfa(&["exact", "--family", "leq", "--eps", "1/8", "--input", "aab"]));
    assert!(doc["reject"]["float"].as_f64().unwrap() > 7.0 / 8.0);
    assert_eq!(doc["promise"], "no");
}

#[test]
fn within_rounds_grows_with_the_round_count() {
    let at = |r: &str| {
        let doc = json(&qcfa(&["exact", "--family", "length", "--m", "3", "--input", "aaa", "--max-rounds", r]));
        doc["within_rounds"]["advance"]["float"].as_f64().unwrap()
    };
    assert!(at("1") < at("10"));
    assert!(at("10") < at("100"));
}

#[test]
fn bounds_for_the_twin_family() {
    let doc = json(&qcfa(&["bounds", "--family", "twin", "--m", "9"]));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["dfa_bound"] == "512"));
}

#[test]
fn report_dfa_column() {
    let out = qcfa(&["report", "--family", "aeq", "--m-range", "1..4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "dfa").unwrap();
    let dfa: Vec<String> = lines.map(|l| l.split(',').nth(col).unwrap().to_string()).collect();
    assert_eq!(dfa, ["4", "6", "8", "10"]);
}

#[test]
fn report_cells_carry_provenance() {
    let doc = json(&qcfa(&["report", "--family", "twin-m", "--m", "4"]));
    let row = &doc["rows"][0];
    for cell in ["qs", "cs", "cs_formula", "dfa"] {
        assert_eq!(row[cell]["provenance"], "exact", "{cell}");
    }
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--family", "length", "--m", "2", "--input", "aaa", "--trials", "3000", "--seed", "17"];
    let a = qcfa(&args);
    let b = qcfa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc = json(&a);
    assert_eq!(doc["strategy"], "monte-carlo");
    assert_eq!(doc["accept"]["provenance"], "sampled");
    assert_eq!(doc["params"]["seed"], 17);
    assert_eq!(doc["params"]["trials"], 3000);
}

#[test]
fn simulate_csv_has_a_header_row() {
    let out = qcfa(&["simulate", "--family", "leq", "--input", "ab", "--trials", "500", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("machine_id,word,strategy,accept"));
}

#[test]
fn dfa_command() {
    let doc = json(&qcfa(&["dfa", "--family", "aeq", "--m", "3", "--input", "aaabbb"]));
    assert_eq!(doc["states"], 8);
    assert_eq!(doc["accepts"], true);
    assert_eq!(doc["certificate"]["bound"], 8);
    let doc = json(&qcfa(&["dfa", "--family", "twin-m", "--m", "3"]));
    assert!(doc["minimized_states"].as_u64().unwrap() >= 8);
    assert_eq!(doc["protocol"]["satisfied"], true);
}

#[test]
fn verify_passes() {
    let out = qcfa(&["verify", "--lemma", "xy-gap", "--max-len", "6"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["reports"][0]["counterexamples"].as_array().unwrap().len(), 0);
    let out = qcfa(&["verify", "--lemma", "walk", "--d-max", "30", "--format", "csv"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.json");
    let out = qcfa(&["bounds", "--family", "aeq", "--m-range", "16,512", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn machine_file_round_trip() {
    let card = Family::Length(2).build(&rat(1, 4)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("length.json");
    std::fs::write(&path, serde_json::to_string(&card).unwrap()).unwrap();
    let from_file = json(&qcfa(&["exact", "--machine-file", path.to_str().unwrap(), "--input", "aaa"]));
    let built = json(&qcfa(&["exact", "--family", "length", "--m", "2", "--input", "aaa"]));
    assert_eq!(from_file["reject"], built["reject"]);
    assert_eq!(from_file["machine_id"], card.id);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&qcfa(&["exact", "--family", "aeq", "--m", "2", "--eps", "0.9", "--input", "ab"])), 1);
    assert_eq!(code(&qcfa(&["exact", "--family", "nope", "--input", "ab"])), 1);
    assert_eq!(code(&qcfa(&["report", "--family", "aeq", "--m-range", "4..1"])), 1);
    assert_eq!(code(&qcfa(&["frobnicate"])), 1);
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(code(&qcfa(&["exact", "--family", "leq", "--input", "abc"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let mut spec = serde_json::to_value(Family::Leq.build(&rat(1, 4)).unwrap()).unwrap();
    spec["machine"]["initial_classical"] = Value::from("nowhere");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = qcfa(&["exact", "--machine-file", path.to_str().unwrap(), "--input", "ab"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("validation"));
}
