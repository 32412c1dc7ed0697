//! The `relcheck` binary: arguments, reports and exit statuses.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn relcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relcheck")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn book() -> String {
    fixture("addressbook.als").display().to_string()
}

#[test]
fn counterexample_exits_with_one() {
    let out = relcheck(&[&book(), "--assert", "delUndoesAddBuggy", "--scope", "16", "--report", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "CE");
    assert_eq!(v["counterexample"]["validated"], true);
    assert_eq!(v["counterexample"]["scope"], 16);
}

#[test]
fn valid_assertion_exits_with_zero() {
    let out = relcheck(&[&book(), "--assert", "delUndoesAdd", "--scope", "32", "64", "--mode", "full", "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "FV");
    assert_eq!(v["bounded_verdict"], "BV");
    assert_eq!(v["scopes"], serde_json::json!([32, 64]));
}

#[test]
fn repeated_scope_flags_accumulate() {
    let out = relcheck(&[&book(), "--assert", "delUndoesAdd", "--scope", "2", "--scope", "3", "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["scopes"], serde_json::json!([2, 3]));
}

#[test]
fn undecided_check_exits_with_two_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let solver = dir.path().join("solver.sh");
    std::fs::write(&solver, "#!/bin/sh\nif grep -q '(set-logic AUFLIA)' \"$1\"; then exec sleep 60; fi\nexec z3 -smt2 \"$1\"\n").unwrap();
    let export = dir.path().join("out");
    let out = relcheck(&[
        &book(),
        "--assert",
        "lookupYields",
        "--mode",
        "full",
        "--scope",
        "2",
        "--timeout",
        "1",
        "--solver",
        &format!("sh {}", solver.display()),
        "--export-obligation",
        export.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("assertion lookupYields: UK\n"), "{text}");
    assert!(text.contains("undecided at stage: unbounded"));
    assert!(text.contains("bounded stage: BV"));
    assert!(text.contains("unbounded: timeout"));
    assert!(export.join("lookupYields.fol").exists());
}

#[test]
fn default_scopes_are_used() {
    let out = relcheck(&[&book(), "--assert", "delUndoesAdd", "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["scopes"], serde_json::json!([4, 8, 16]));
}

#[test]
fn solver_environment_variable_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_relcheck"))
        .args([&book(), "--assert", "delUndoesAdd", "--scope", "2"])
        .env("RELCHECK_SOLVER", "no-such-solver-binary")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-solver-binary"));
}

#[test]
fn errors_exit_with_three() {
    let missing = relcheck(&["/no/such/file.als", "--assert", "a"]);
    assert_eq!(missing.status.code(), Some(3));
    let unknown = relcheck(&[&book(), "--assert", "nope", "--scope", "2"]);
    assert_eq!(unknown.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("unknown assertion `nope`"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.als");
    std::fs::write(&bad, "sig A { f: B }").unwrap();
    let typo = relcheck(&[bad.to_str().unwrap(), "--assert", "a"]);
    assert_eq!(typo.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&typo.stderr).contains("unresolved name `B`"));
}

#[test]
fn usage_errors_exit_with_three() {
    assert_eq!(relcheck(&[&book()]).status.code(), Some(3));
    assert_eq!(relcheck(&[&book(), "--assert", "a", "--scope", "0"]).status.code(), Some(3));
    assert_eq!(relcheck(&[&book(), "--assert", "a", "--mode", "sometimes"]).status.code(), Some(3));
    assert_eq!(relcheck(&[&book(), "--assert", "delUndoesAdd", "--timeout", "-1"]).status.code(), Some(3));
    assert_eq!(relcheck(&[&book(), "--assert", "delUndoesAdd", "--timeout=0"]).status.code(), Some(3));
    let help = relcheck(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for flag in ["--assert", "--scope", "--mode", "--timeout", "--solver", "--keep-smt", "--export-obligation", "--finite-ordering", "--report"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn finite_ordering_reaches_the_obligation() {
    let dir = tempfile::tempdir().unwrap();
    let out = relcheck(&[
        &book(),
        "--assert",
        "lookupYields",
        "--mode",
        "full",
        "--scope",
        "2",
        "--finite-ordering",
        "3",
        "--export-obligation",
        dir.path().to_str().unwrap(),
        "--report",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["closure_overapproximated"], true);
    let text = std::fs::read_to_string(v["obligation"].as_str().unwrap()).unwrap();
    assert!(text.contains("(i < 3)"));
}
