use std::process::{Command, Output};

use serde_json::Value;

fn renormlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renormlab")).args(args).output().unwrap()
}

#[test]
fn list_names_every_scenario() {
    let out = renormlab(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), renormlab::CATALOG.len());
    assert!(text.contains("c-renorm-audit — "));
}

#[test]
fn run_emits_report_fields() {
    let out = renormlab(&["run", "f2-l1-obstruction", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scenario"], "f2-l1-obstruction");
    assert_eq!(v["expectations_met"], true);
    for r in v["reports"].as_array().unwrap() {
        for key in ["check", "instance", "trials", "verdict", "witnesses", "max_radius", "refinements"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn expected_failures_exit_zero() {
    let out = renormlab(&["run", "c-renorm-audit"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reports"][0]["verdict"], "FAIL");
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = renormlab(&["run", "subshift-identities", "--window", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["window"], 12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(renormlab(&["run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(renormlab(&["run", "find-np", "--precision", "0"]).status.code(), Some(2));
    assert_eq!(renormlab(&["run", "find-np", "--precision", "x/y"]).status.code(), Some(2));
    assert_eq!(renormlab(&["run", "c0-sorted-invariance", "--dim", "100000"]).status.code(), Some(2));
    assert_eq!(renormlab(&["bogus"]).status.code(), Some(2));
}

#[test]
fn seeds_change_samples_not_verdicts() {
    let a = renormlab(&["run", "c0-sorted-invariance", "--seed", "1", "--trials", "50"]);
    let b = renormlab(&["run", "c0-sorted-invariance", "--seed", "2", "--trials", "50"]);
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    assert_ne!(a.stdout, b.stdout);
}
