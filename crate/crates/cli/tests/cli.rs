use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pointring(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pointring"))
        .args(args)
        .env("POINTRING_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn dims_six() {
    let dir = tempfile::tempdir().unwrap();
    let out = pointring(dir.path(), &["--format", "json", "dims", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["matchings"], 15);
    assert_eq!(v["result"]["planar_matchings"], 5);
    assert_eq!(v["result"]["dim_w"], 15);
    assert_eq!(v["provenance"][0]["holds"], true);
}

#[test]
fn identities_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = pointring(dir.path(), &["--no-cache", "--format", "json", "identities"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["passed"], "4/4");
}

#[test]
fn span_eight_over_z() {
    let dir = tempfile::tempdir().unwrap();
    let out = pointring(dir.path(), &["--format", "json", "span", "--n", "8", "--gens", "simple", "--over", "z"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let claims = v["provenance"].as_array().unwrap();
    let i2 = claims.iter().find(|c| c["claim"].as_str().unwrap().contains("I^(2) over Z")).unwrap();
    assert_eq!(i2["holds"], true);
    assert_eq!(i2["kind"], "theorem-instance");
    // the V⊗V lattice has index 2; reported, not claimed
    let b = claims.iter().find(|c| c["claim"].as_str().unwrap().contains("span B")).unwrap();
    assert_eq!(b["holds"], false);
    assert_eq!(b["kind"], "exploratory");
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pointring(dir.path(), &["dims", "7"]).status.code(), Some(1));
    assert_eq!(pointring(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(pointring(dir.path(), &["merge-span", "--n", "8", "--mod", "4"]).status.code(), Some(1));
    assert_eq!(pointring(dir.path(), &["reduce", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(pointring(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn forbidden_input_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    // two odd cycles
    fs::write(&g, r#"{"n":10,"edges":[[0,1],[1,2],[2,3],[3,4],[0,4],[5,6],[6,7],[7,8],[8,9],[5,9]]}"#).unwrap();
    let out = pointring(dir.path(), &["reduce", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("forbidden"));
}

#[test]
fn reduce_and_straighten_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    fs::write(&g, r#"{"n":10,"edges":[[0,5],[5,7],[0,7],[1,3],[3,8],[1,8],[2,4],[4,6],[6,9],[2,9]]}"#).unwrap();
    let out = pointring(dir.path(), &["--format", "json", "reduce", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["trace"].as_array().unwrap().len() > 1);
    assert_eq!(v["result"]["check"]["forbidden"], 0);
    let out = pointring(dir.path(), &["--format", "json", "straighten", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn cache_replays_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = pointring(dir.path(), &["--format", "json", "qp-census", "--n", "8"]);
    assert_eq!(first.status.code(), Some(0));
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = pointring(dir.path(), &["--format", "json", "qp-census", "--n", "8"]);
    assert_eq!(first.stdout, second.stdout);
    let fresh = pointring(dir.path(), &["--no-cache", "--format", "json", "qp-census", "--n", "8"]);
    assert_eq!(first.stdout, fresh.stdout);
}

#[test]
fn stale_cache_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pointring(dir.path(), &["cubic-n6"]).status.code(), Some(0));
    let entry = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = fs::read_to_string(&entry).unwrap();
    let mut e: Value = serde_json::from_str(&text).unwrap();
    e["version"] = Value::from("0.0.0-old");
    fs::write(&entry, e.to_string()).unwrap();
    let out = pointring(dir.path(), &["cubic-n6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stale"));
    assert_eq!(pointring(dir.path(), &["--refresh", "cubic-n6"]).status.code(), Some(0));
    assert_eq!(pointring(dir.path(), &["cubic-n6"]).status.code(), Some(0));
}

#[test]
fn export_writes_sparse_text() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("m.sms");
    let out = pointring(dir.path(), &["export", "--matrix", "mult", "--n", "6", "--out", out_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(&out_file).unwrap().starts_with("15 15 M"));
}

#[test]
fn exchange_refuses_below_twelve_and_over_budget() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pointring(dir.path(), &["exchange", "--n", "10"]).status.code(), Some(1));
    let out = pointring(dir.path(), &["--no-cache", "--memory-mb", "16", "exchange"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}
