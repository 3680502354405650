//! Validates emitted reports against the shipped JSON schema with Python's
//! `jsonschema` package when it is available.

use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

const SCHEMA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json");

fn report(weights: &str, extra: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    std::fs::write(&path, weights).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .arg("analyze")
        .arg(&path)
        .args(["--trials", "100", "--n-trunc", "12"])
        .args(extra)
        .output()
        .unwrap();
    String::from_utf8(out.stdout).unwrap()
}

fn reports() -> Vec<String> {
    vec![
        report(
            r#"{"b":{"explicit":[1,0.5,0.25]},"lambda":{"explicit":[1,0.8]}}"#,
            &[],
        ),
        report(r#"{"b":{"family":"power","alpha":0}}"#, &["--p", "2"]),
        report(r#"{"b":{"family":"geometric","r":0.3}}"#, &["--p", "3"]),
        report(r#"{"b":{"explicit":[2]}}"#, &["--p", "1"]),
        // stops at the condition stage
        report(r#"{"b":{"family":"power","alpha":0}}"#, &["--p", "1"]),
    ]
}

#[test]
fn top_level_keys_match_schema() {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(SCHEMA).unwrap()).unwrap();
    let mut required: Vec<&str> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    required.sort();
    for text in reports() {
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, required);
    }
}

#[test]
fn reports_validate_against_schema() {
    const SCRIPT: &str = r#"
import json, sys
import jsonschema
schema = json.load(open(sys.argv[1]))
jsonschema.Draft202012Validator.check_schema(schema)
for doc in json.load(sys.stdin):
    jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
"#;
    let have_python = Command::new("python3")
        .args(["-c", "import jsonschema"])
        .output()
        .is_ok_and(|o| o.status.success());
    if !have_python {
        eprintln!("skipping: python3 with jsonschema not found");
        return;
    }
    let docs: Vec<Value> = reports()
        .iter()
        .map(|t| serde_json::from_str(t).unwrap())
        .collect();
    let mut child = Command::new("python3")
        .args(["-c", SCRIPT, SCHEMA])
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(serde_json::to_string(&docs).unwrap().as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
