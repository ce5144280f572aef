use std::process::{Command, Output};

use serde_json::Value;

fn kwise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kwise"))
        .args(args)
        .env_remove("KWISE_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn certify_small_window() {
    let out = kwise(&["certify", "--f", "x^1.5", "--k", "2", "--H", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "kwise.verification/1");
    assert_eq!(v["kwise_coprime"], true);
    assert_eq!(v["floors"], serde_json::json!(["5", "8", "11"]));
}

#[test]
fn certify_reports_common_factor() {
    // floor(n^2) at n = 2, 3, 4, 5, 6 shares factors pairwise.
    let out = kwise(&["certify", "--f", "x^2", "--k", "2", "--H", "5", "--n", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["kwise_coprime"], false);
    assert!(v["failing_subset"].is_array());
}

#[test]
fn polynomial_scan_finds_nothing() {
    let out = kwise(&["scan", "--f", "x^2+1/x", "--k", "2", "--H", "4", "--range", "2:1000"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["witnesses"], serde_json::json!([]));
    assert_eq!(v["scanned"], 999);
}

#[test]
fn scan_finds_witnesses() {
    let out = kwise(&["scan", "--f", "x^1.5", "--k", "2", "--H", "3", "--range", "2:50", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn polynomial_fails_hypotheses() {
    let out = kwise(&["hypotheses", "--f", "x^2+1/x", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["admissible"], false);
    let ok = kwise(&["hypotheses", "--f", "x^1.5", "--k", "2"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn bad_input_exits_2() {
    let out = kwise(&["eval", "--f", "x^(", "--x", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_json(&out);
    assert_eq!(e["schema"], "kwise.error/1");
    assert_eq!(e["exit_code"], 2);
    assert_eq!(kwise(&["scan", "--f", "x^1.5", "--k", "2", "--H", "3", "--range", "9"]).status.code(), Some(2));
    assert_eq!(kwise(&["certify", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn near_integer_is_undecidable() {
    let args = ["eval", "--f", "x^(1/2)", "--x", "99999999999999999999", "--precision-cap", "16"];
    let out = kwise(&args);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["kind"], "undecidable");
    let full = kwise(&args[..5]);
    assert_eq!(full.status.code(), Some(0));
    assert_eq!(json(&full)["result"]["floor_part"], "9999999999");
}

#[test]
fn precision_cap_from_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_kwise"))
        .args(["eval", "--f", "x^(1/2)", "--x", "99999999999999999999"])
        .env("KWISE_PRECISION_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ladder_admissibility() {
    let out = kwise(&["ladder", "--k", "2", "--H", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["admissible"], true);
    let bad = kwise(&["ladder", "--k", "2", "--H", "2", "--constants", "C1=2^5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!json(&bad)["violations"].as_array().unwrap().is_empty());
}

#[test]
fn witness_with_small_ladder_verifies() {
    let out = kwise(&[
        "witness",
        "--f",
        "x^1.5",
        "--k",
        "2",
        "--H",
        "2",
        "--constants",
        "C0=2^10,C1=2^13,D0=8,D1=2^11,D2=2^67",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verification"]["kwise_coprime"], true);
    assert_eq!(v["verification"]["flags"]["c0"], true);
}

#[test]
fn output_is_deterministic() {
    let args = ["density", "--experiment", "beatty", "--alpha", "sqrt(2)", "--N", "500,1000"];
    let a = kwise(&args);
    let b = kwise(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = [
        "banach",
        "--f",
        "x^1.5",
        "--k",
        "2",
        "--H1",
        "2",
        "--constants",
        "C0=2^10,C1=2^13,D0=8,D1=2^11,D2=2^67",
        "--seed",
        "7",
    ];
    let a = kwise(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, kwise(&args).stdout);
}

#[test]
fn csv_and_human_formats() {
    let out = kwise(&["density", "--experiment", "dirichlet", "--N", "100", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("experiment,N,count,total,frequency,target,deviation"));
    assert!(lines.next().unwrap().starts_with("dirichlet,100,"));
    let out = kwise(&["ladder", "--k", "2", "--H", "2", "--format", "human"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "admissible: true"));
}

#[test]
fn config_file_supplies_flags() {
    let path = std::env::temp_dir().join(format!("kwise-cli-test-{}.conf", std::process::id()));
    std::fs::write(&path, "# window\nf = x^1.5\nk = 2\nH = 3\nn = 5\n").unwrap();
    let out = kwise(&["certify", "--n", "2", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["n"], "2");
}
