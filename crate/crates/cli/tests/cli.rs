use std::path::PathBuf;
use std::process::{Command, Output};

fn chirality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chirality")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chirality-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn info_reports_invariants() {
    let out = chirality(&["info", "-A1+<6>+A1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["invariants"], serde_json::json!({"rho": 3, "d": 3, "parity": "odd"}));
    assert_eq!(v["table_entry"], "-A1+<6>+A1");
}

#[test]
fn bad_expression_is_a_usage_error() {
    assert_eq!(chirality(&["info", "X+"]).status.code(), Some(1));
    assert_eq!(chirality(&["vinberg"]).status.code(), Some(1));
}

#[test]
fn exhausted_budget_exits_2() {
    assert_eq!(chirality(&["vinberg", "U+A2+2E8", "--max-roots", "3"]).status.code(), Some(2));
}

#[test]
fn certificates_round_trip_and_tampering_exits_3() {
    let path = scratch("cert.json");
    let p = path.to_str().unwrap();
    let out = chirality(&["chirality", "U(2)+A2", "--out", p]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ok = chirality(&["verify", p]);
    assert!(ok.status.success());
    assert!(String::from_utf8(ok.stdout).unwrap().contains("chiral"));

    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("\"chiral\"", "\"achiral\"", 1);
    assert_ne!(text, tampered);
    let bad = scratch("bad.json");
    std::fs::write(&bad, tampered).unwrap();
    assert_eq!(chirality(&["verify", bad.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn graph_emits_dot() {
    let out = chirality(&["graph", "U(2)+A2", "--format", "dot"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("graph"));
}

#[test]
fn tables_lists_every_entry() {
    let out = chirality(&["tables", "--parity", "all", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().map(Vec::len), Some(75));
}
