//! End-to-end runs of the command-line binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonsub::regex::RegexLang;
use serde_json::{json, Value};
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jsonsub")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let (old, new) = (fixture("wp_category_0.6.1"), fixture("wp_category_0.6.2"));
    assert_eq!(code(&run(&["check", p(&old), p(&new), "--direction", "sub"])), 0);
    assert_eq!(code(&run(&["check", p(&new), p(&old)])), 1);
    assert_eq!(code(&run(&["check", p(&new), p(&old), "--direction", "super"])), 0);
    assert_eq!(code(&run(&["check", p(&old), p(&old)])), 0);
    assert_eq!(code(&run(&["equiv", p(&old), p(&new)])), 1);

    let dir = TempDir::new().unwrap();
    let rec = write(dir.path(), "rec.json", r##"{"$ref":"#"}"##);
    let y = write(dir.path(), "y.json", r#"{"type":"string"}"#);
    let out = run(&["check", &rec, &y, "--json"]);
    assert_eq!(code(&out), 2);
    let line = stdout_json(&out);
    assert_eq!(line["verdict"], "Undecidable");
    assert_eq!(line["tag"], "RecursiveRef");

    let bad = write(dir.path(), "bad.json", "{");
    assert_eq!(code(&run(&["check", &bad, &y])), 3);
    let meta_invalid = write(dir.path(), "meta.json", r#"{"minLength":-1}"#);
    assert_eq!(code(&run(&["check", &meta_invalid, &y])), 3);
    let missing = dir.path().join("absent.json");
    assert_eq!(code(&run(&["check", p(&missing), &y])), 3);
}

#[test]
fn json_lines_for_every_verdict() {
    let (old, new) = (fixture("wp_category_0.6.1"), fixture("wp_category_0.6.2"));
    for (l, r) in [(&old, &new), (&new, &old)] {
        let out = run(&["check", p(l), p(r), "--json"]);
        let line = stdout_json(&out);
        assert!(line["verdict"].is_string());
        assert_eq!(line["direction"], "sub");
    }
    let out = run(&["check", p(&new), p(&old), "--json"]);
    assert!(stdout_json(&out)["detail"].as_str().unwrap().contains("stock"));
}

#[test]
fn time_budget_expiry_is_a_capacity_verdict() {
    let dir = TempDir::new().unwrap();
    let l = write(dir.path(), "l.json", r#"{"type":"number","multipleOf":1000003}"#);
    let r = write(dir.path(), "r.json", r#"{"type":"number","not":{"multipleOf":999983}}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_jsonsub"))
        .args(["check", &l, &r, "--json", "--time-budget", "0.2"])
        .env("JSONSUB_POINT_BUDGET", u64::MAX.to_string())
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert_eq!(stdout_json(&out)["tag"], "CapacityLimit");
    // The default point budget refuses the same check without a timer.
    let out = run(&["check", &l, &r, "--json"]);
    assert_eq!(stdout_json(&out)["tag"], "CapacityLimit");
}

#[test]
fn canonicalize_and_simplify() {
    let dir = TempDir::new().unwrap();
    let int = write(dir.path(), "int.json", r#"{"type":"integer"}"#);
    let out = run(&["canonicalize", &int]);
    assert_eq!(code(&out), 0);
    let c = stdout_json(&out);
    assert_eq!(c["type"], "number");
    assert_eq!(c["multipleOf"], json!(1));
    assert!(c.get("minimum").is_none() && c.get("maximum").is_none());

    let out = run(&["simplify", p(&fixture("shape_a"))]);
    assert_eq!(code(&out), 0);
    let s = stdout_json(&out);
    let branches = s["anyOf"].as_array().unwrap();
    assert_eq!(branches.len(), 2);
    assert_eq!(branches[0], json!({"type": "null"}));
    assert_eq!(branches[1]["type"], "string");
    let printed = RegexLang::pattern(branches[1]["pattern"].as_str().unwrap()).unwrap();
    assert_eq!(printed, RegexLang::pattern(".+").unwrap());

    let unsupported = write(dir.path(), "u.json", r#"{"pattern":"(a)\\1"}"#);
    assert_eq!(code(&run(&["canonicalize", &unsupported])), 2);
    let bad = write(dir.path(), "bad.json", "[");
    assert_eq!(code(&run(&["simplify", &bad])), 3);
}

#[test]
fn validate_command() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "s.json", r#"{"type":"string","minLength":1,"pattern":"[a-z]*"}"#);
    let good = write(dir.path(), "good.json", r#""abc""#);
    let empty = write(dir.path(), "empty.json", r#""""#);
    assert_eq!(code(&run(&["validate", &good, &s])), 0);
    assert_eq!(code(&run(&["validate", &empty, &s])), 1);
    let bad = write(dir.path(), "bad.json", "nul");
    assert_eq!(code(&run(&["validate", &bad, &s])), 3);
}

fn records(text: &str) -> (Vec<Value>, Value) {
    let mut lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let footer = lines.pop().unwrap();
    (lines, footer["footer"].clone())
}

#[test]
fn corpus_reports() {
    let (old, new) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let (o, n) = (old.path(), new.path());
    write(o, "same.json", r#"{"type":"string"}"#);
    write(n, "same.json", r#"{"type":"string"}"#);
    let out = run(&["corpus", p(o), p(n)]);
    assert_eq!(code(&out), 0);
    let (recs, footer) = records(&String::from_utf8(out.stdout).unwrap());
    assert!(recs.is_empty());
    assert_eq!(footer["pairs"], 0);

    write(o, "enum.json", r#"{"type":"string","enum":["a","b"]}"#);
    write(n, "enum.json", r#"{"type":"string","enum":["a","b","c"]}"#);
    write(o, "broken.json", r#"{"type":"string"}"#);
    write(n, "broken.json", r#"{"type":"#);
    write(o, "only_old.json", "{}");
    let out_dir = TempDir::new().unwrap();
    let report = out_dir.path().join("report.jsonl");
    let out = run(&["corpus", p(o), p(n), "--out", p(&report), "--jobs", "2"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&report).unwrap();
    let (recs, footer) = records(&text);
    assert_eq!(recs.len(), 2);
    assert!(recs[0]["lhs"].as_str().unwrap().ends_with("broken.json"));
    assert_eq!(recs[0]["verdict"], "InputError");
    assert_eq!(recs[0]["tag"], "InputError");
    assert!(recs[1]["lhs"].as_str().unwrap().ends_with("enum.json"));
    assert_eq!(recs[1]["verdict"], "Holds");
    assert_eq!(footer["pairs"], 2);
    let counted: u64 = footer["verdicts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(counted, 2);

    // Deterministic apart from timings.
    let strip = |text: &str| -> Vec<Value> {
        let (mut recs, footer) = records(text);
        for r in &mut recs {
            r.as_object_mut().unwrap().remove("elapsed_ms");
        }
        recs.push(footer);
        recs
    };
    let a = run(&["corpus", p(o), p(n), "--jobs", "3"]);
    let b = run(&["corpus", p(o), p(n), "--jobs", "1"]);
    assert_eq!(strip(&String::from_utf8(a.stdout).unwrap()), strip(&String::from_utf8(b.stdout).unwrap()));
}

#[test]
fn missing_corpus_directory_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let absent = dir.path().join("nope");
    assert_eq!(code(&run(&["corpus", p(&absent), p(dir.path())])), 3);
}
