use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hardylab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(args)
        .env_remove("HARDYLAB_TOL")
        .output()
        .expect("binary runs")
}

fn weight_file(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn check_condition_point_mass() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(
        &dir,
        "w.json",
        r#"{"b":{"explicit":[1,0,0]},"lambda":{"family":"unit"}}"#,
    );
    let o = hardylab(&["check-condition", &f, "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["u_prime"], 1.0);
    assert_eq!(v["argmax_n"], 1);
    assert_eq!(v["exact"], true);
}

#[test]
fn harmonic_weights_diverge_at_p_one() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(&dir, "w.json", r#"{"b":{"family":"power","alpha":0}}"#);
    let o = hardylab(&["check-condition", "--weights", &f, "--p", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_out(&o)["error"]["kind"], "DivergentSeries");

    let o = hardylab(&["check-condition", &f]);
    assert_eq!(o.status.code(), Some(0));
    let u = json_out(&o)["u_prime"].as_f64().unwrap();
    assert!((u - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);
}

#[test]
fn input_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let bad = weight_file(&dir, "bad.json", "{\"b\": {\"explicit\": [1,\n 2,, 3]}}");
    let o = hardylab(&["check-condition", &bad]);
    assert_eq!(o.status.code(), Some(3));
    let v = json_out(&o);
    assert_eq!(v["error"]["kind"], "ParseError");
    assert!(
        v["error"]["message"].as_str().unwrap().contains("line 2"),
        "{v}"
    );

    let neg = weight_file(&dir, "neg.json", r#"{"b":{"explicit":[1,-1]}}"#);
    let o = hardylab(&["check-condition", &neg]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_out(&o)["error"]["kind"], "RejectedInput");

    let o = hardylab(&[
        "check-condition",
        &dir.path().join("missing.json").to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json_out(&o)["error"]["kind"], "IoError");

    let o = hardylab(&["check-condition", &neg, "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(
        hardylab(&["check-condition", "--n-max", "x"]).status.code(),
        Some(3)
    );
    assert_eq!(
        hardylab(&["verify", "--which", "nope"]).status.code(),
        Some(3)
    );
}

#[test]
fn analyze_point_mass_sandwich() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(&dir, "w.json", r#"{"b":{"explicit":[1,0,0,0]}}"#);
    let o = hardylab(&["analyze", &f, "--trials", "200"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let v = json_out(&o);
    assert_eq!(v["bounds"]["lower"], 1.0);
    assert_eq!(v["bounds"]["upper_new"], 9.0);
    assert_eq!(v["bounds"]["upper_bge"], 16.0);
    let est = v["estimate"]["estimate"].as_f64().unwrap();
    assert!((est - 1.0).abs() < 1e-9, "{est}");
    assert!(v["incomplete"].is_null());
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn analyze_p_one_uses_linear_bound() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(&dir, "w.json", r#"{"b":{"explicit":[1,0.5,0.25]}}"#);
    let o = hardylab(&["analyze", &f, "--p", "1", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    let u = v["bounds"]["u_prime"].as_f64().unwrap();
    assert!((v["bounds"]["upper_new"].as_f64().unwrap() - (u + 1.0)).abs() < 1e-12);
    assert_eq!(v["estimate"]["method"], "Multistart");
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(
        &dir,
        "w.json",
        r#"{"b":{"family":"geometric","r":0.6},"lambda":{"explicit":[1,0.5]}}"#,
    );
    let args = [
        "analyze",
        f.as_str(),
        "--p",
        "1.5",
        "--seed",
        "42",
        "--trials",
        "300",
        "--n-trunc",
        "16",
    ];
    let a = hardylab(&args);
    let b = hardylab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let v = hardylab(&["verify", "--trials", "300", "--seed", "5"]);
    let w = hardylab(&["verify", "--trials", "300", "--seed", "5"]);
    assert_eq!(v.stdout, w.stdout);
}

#[test]
fn analyze_writes_report_and_csv() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(&dir, "w.json", r#"{"b":{"explicit":[1,1,1]}}"#);
    let out = dir.path().join("report.json");
    let csv = dir.path().join("rows.csv");
    let o = hardylab(&[
        "analyze",
        &f,
        "--n-max",
        "6",
        "--trials",
        "50",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["inputs"]["n_max"], 6);

    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,q_n,tail_value,tail_error,step_ratio");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("1,"));
}

#[test]
fn divergent_analysis_is_marked_incomplete() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(&dir, "w.json", r#"{"b":{"family":"power","alpha":0.5}}"#);
    let o = hardylab(&["analyze", &f, "--p", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_out(&o);
    assert_eq!(v["incomplete"]["stage"], "condition");
    assert_eq!(v["incomplete"]["kind"], "DivergentSeries");
    assert!(v["condition"].is_null());
}

#[test]
fn verify_selected_checks() {
    let o = hardylab(&["verify", "--which", "lemma1", "--trials", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["passed"], true);

    let o = hardylab(&[
        "verify",
        "--which",
        "counterexample",
        "--p",
        "3",
        "--n",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let ce = &json_out(&o)["checks"][0]["counterexample"];
    assert!(ce["epsilon"].as_f64().unwrap() > 0.0);
    assert!(ce["f_value"].as_f64().unwrap() > 0.0);

    let o = hardylab(&["verify", "--which", "g", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));

    // no counterexample exists at p = 2, so the search must report failure
    let o = hardylab(&[
        "verify",
        "--which",
        "counterexample",
        "--p",
        "2",
        "--n",
        "3",
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn tolerance_override_from_environment() {
    let dir = TempDir::new().unwrap();
    let f = weight_file(&dir, "w.json", r#"{"b":{"explicit":[1,0.5]}}"#);
    let o = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["analyze", &f, "--trials", "50"])
        .env("HARDYLAB_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));

    let o = Command::new(env!("CARGO_BIN_EXE_hardylab"))
        .args(["analyze", &f, "--trials", "50"])
        .env("HARDYLAB_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
