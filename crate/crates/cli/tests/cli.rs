use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_heyting-lab"));
    for var in ["HEYTING_LAB_MAX_POSETS", "HEYTING_LAB_MAX_STEPS", "HEYTING_LAB_MAX_DEPTH", "HEYTING_LAB_MAX_EPPA"] {
        c.env_remove(var);
    }
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn posets_enum_counts() {
    let out = run(&["posets", "enum", "--max", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["counts"], serde_json::json!([1, 2, 5, 16, 63]));
}

#[test]
fn bounds_are_usage_errors() {
    assert_eq!(code(&run(&["posets", "enum", "--max", "9"])), 2);
    assert_eq!(code(&run(&["demo", "tree", "--depth", "9"])), 2);
    assert_eq!(code(&run(&["demo", "eppa", "--bound", "8"])), 2);
    assert_eq!(code(&run(&["chain", "build", "--steps", "1000"])), 2);
}

#[test]
fn environment_lowers_the_maxima() {
    let out = bin().args(["posets", "enum", "--max", "4"]).env("HEYTING_LAB_MAX_POSETS", "3").output().unwrap();
    assert_eq!(code(&out), 2);
    let out = bin().args(["posets", "enum", "--max", "3"]).env("HEYTING_LAB_MAX_POSETS", "3").output().unwrap();
    assert_eq!(code(&out), 0);
    let out = bin().args(["demo", "tree", "--depth", "2"]).env("HEYTING_LAB_MAX_DEPTH", "1").output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn unknown_flags_and_commands_are_usage_errors() {
    assert_eq!(code(&run(&["posets", "enum", "--bogus"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["--indep-mode", "sometimes", "check"])), 2);
}

#[test]
fn bad_documents_are_usage_errors() {
    let input = fixture("not_a_poset.json");
    assert_eq!(code(&run(&["export", "dot", "--input", input.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["ha", "dual", "--input", "/nonexistent/file.json"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&run(&["amalgamate", "--input", junk.to_str().unwrap()])), 2);
}

#[test]
fn amalgamate_two_chains() {
    let input = fixture("two_chains.json");
    let out = run(&["amalgamate", "--input", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["summary"]["size"], 6);
    let cert = &doc["summary"]["certificate"];
    assert_eq!((&cert["commutes"], &cert["strong"], &cert["super_independent"]), (&Value::Bool(true), &Value::Bool(true), &Value::Bool(true)));
}

#[test]
fn independence_check_exit_codes() {
    let input = fixture("four_chain_indep.json");
    let path = input.to_str().unwrap();
    let out = run(&["indep", "check", "--input", path]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["independent"], false);
    assert_eq!(code(&run(&["indep", "check", "--input", path, "--require"])), 1);
    assert_eq!(code(&run(&["--indep-mode", "disjunction", "indep", "check", "--input", path, "--require"])), 0);
}

#[test]
fn algebra_commands() {
    let c4 = fixture("four_chain.json");
    let out = run(&["ha", "dual", "--input", c4.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["points"], 3);
    let out = run(&["ha", "embed", "--from", c4.to_str().unwrap(), "--into", c4.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn eppa_demo_verdicts() {
    let out = run(&["demo", "eppa"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["verdict"], "refuted-for-all-sizes");
    assert_eq!(doc["witness_count"], 0);
    let out = run(&["demo", "eppa", "--fixture", "transposition", "--bound", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"], "extends");
}

#[test]
fn demos_succeed() {
    for args in [
        &["demo", "tree", "--depth", "2"][..],
        &["demo", "split", "--rounds", "3"],
        &["demo", "swap", "--fixture", "grid"],
        &["demo", "swap", "--fixture", "six"],
        &["demo", "wei"],
        &["chain", "build", "--steps", "6"],
        &["check"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn split_with_an_explicit_up_set() {
    let grid = fixture("grid.json");
    let out = run(&["demo", "split", "--input", grid.to_str().unwrap(), "--upset", "1,3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["demo", "split", "--input", grid.to_str().unwrap(), "--upset", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn injected_fault_fails_the_check() {
    let out = run(&["check", "--inject-fault"]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    let failed: Vec<&str> = text.lines().filter(|l| l.contains("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{text}");
    assert!(failed[0].contains("skeletal check passes on every fixture"));
}

#[test]
fn output_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("catalog.json");
    let out = run(&["-o", target.to_str().unwrap(), "posets", "enum", "--max", "4"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["counts"], serde_json::json!([1, 2, 5, 16]));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn failed_runs_leave_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json");
    let out = run(&["-o", target.to_str().unwrap(), "posets", "enum", "--max", "9"]);
    assert_eq!(code(&out), 2);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
    let missing = dir.path().join("no/such/dir/out.json");
    let out = run(&["-o", missing.to_str().unwrap(), "posets", "enum", "--max", "2"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn dot_export_of_a_chain_document() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    assert_eq!(code(&run(&["-o", chain.to_str().unwrap(), "chain", "build", "--steps", "4"])), 0);
    let out = run(&["export", "dot", "--input", chain.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph") && dot.contains("subgraph"));
}

#[test]
fn same_seed_same_bytes() {
    let a = run(&["--seed", "3", "chain", "build", "--steps", "6"]);
    let b = run(&["--seed", "3", "chain", "build", "--steps", "6"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}
