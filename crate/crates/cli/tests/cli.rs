use std::io::Write;
use std::process::{Command, Output, Stdio};

use sic_core::fixtures;
use tempfile::NamedTempFile;

fn instance_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn sicb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sicb")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn row<'a>(text: &'a str, name: &str) -> Vec<&'a str> {
    text.lines()
        .find(|l| l.split_whitespace().next() == Some(name))
        .unwrap_or_else(|| panic!("no {name} row in\n{text}"))
        .split_whitespace()
        .collect()
}

#[test]
fn example_one_table() {
    let f = instance_file(fixtures::EXAMPLE_ONE_B_FORM);
    let out = sicb(&["bounds", f.path().to_str().unwrap(), "--notation", "B", "--bounds", "smais,sbac,spm"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(row(&text, "smais")[1], "1/3");
    assert_eq!(row(&text, "sbac")[1], "2/7");
    assert_eq!(row(&text, "spm")[1], "2/7");
}

#[test]
fn single_bound_row() {
    let f = instance_file(fixtures::TOY_A_FORM);
    let out = sicb(&["bounds", f.path().to_str().unwrap(), "--bounds", "mais"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with("note:")).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("mais"));
}

#[test]
fn standard_input_is_accepted() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sicb"))
        .args(["bounds", "-", "--bounds", "mais"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(fixtures::PARITY_A_FORM.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(row(&stdout(&out), "mais")[1], "1/1");
}

#[test]
fn malformed_input_exits_one() {
    let f = instance_file("n=2\n1|2\n");
    let out = sicb(&["bounds", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = sicb(&["bounds", "/nonexistent/instance.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let f = instance_file(fixtures::TOY_A_FORM);
    let out = sicb(&["bounds", f.path().to_str().unwrap(), "--bounds", "mais,nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_finds_parity_code() {
    let f = instance_file(fixtures::PARITY_A_FORM);
    let out = sicb(&["oracle", f.path().to_str().unwrap(), "--max-t", "1", "--max-M", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("best rate 1/1 at t = 1, M = 2"), "{text}");
    assert!(!text.contains("VIOLATED"));
}

#[test]
fn oracle_reports_no_code_for_conflict() {
    let f = instance_file(fixtures::CONFLICT_A_FORM);
    let out = sicb(&["oracle", f.path().to_str().unwrap(), "--max-t", "1", "--max-M", "16"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("no valid code found"));
}

#[test]
fn oracle_guard_exits_three() {
    let f = instance_file(fixtures::CONFLICT_A_FORM);
    let out = sicb(&["oracle", f.path().to_str().unwrap(), "--max-t", "9", "--max-M", "99"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_lists_all_codes() {
    let f = instance_file(fixtures::PARITY_A_FORM);
    let out = sicb(&["oracle", f.path().to_str().unwrap(), "--max-M", "2", "--find-all", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["best"]["rate"], "1/1");
    assert_eq!(v["all_codes"].as_array().unwrap().len(), 1);
    assert_eq!(v["truncated"], false);
}

#[test]
fn json_is_identical_across_thread_counts() {
    let f = instance_file(fixtures::TOY_A_FORM);
    let path = f.path().to_str().unwrap();
    let one = sicb(&["--threads", "1", "bounds", path, "--json"]);
    let four = sicb(&["--threads", "4", "bounds", path, "--json"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["bounds"].as_array().unwrap().len(), 5);
}

#[test]
fn timings_appear_only_on_request() {
    let f = instance_file(fixtures::TOY_A_FORM);
    let path = f.path().to_str().unwrap();
    let plain = stdout(&sicb(&["bounds", path, "--json"]));
    let timed = stdout(&sicb(&["bounds", path, "--json", "--timings"]));
    assert!(!plain.contains("seconds"));
    assert!(timed.contains("seconds"));
}

#[test]
fn dump_lp_writes_program() {
    let f = instance_file(fixtures::TOY_A_FORM);
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("spm.lp");
    let out = sicb(&["bounds", f.path().to_str().unwrap(), "--bounds", "spm", "--dump-lp", lp.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(!std::fs::read_to_string(&lp).unwrap().trim().is_empty());
}

#[test]
fn partition_lists_cells() {
    let f = instance_file(fixtures::CONFLICT_A_FORM);
    let text = stdout(&sicb(&["partition", f.path().to_str().unwrap()]));
    assert!(text.starts_with("gamma=4"));
    assert!(text.contains("N_0: {}"));
    let out = sicb(&["partition", f.path().to_str().unwrap(), "--json"]);
    assert!(serde_json::from_slice::<serde_json::Value>(&out.stdout).is_ok());
}

#[test]
fn explain_chain_shows_edges() {
    let f = instance_file(fixtures::CONFLICT_A_FORM);
    let text = stdout(&sicb(&["explain-chain", f.path().to_str().unwrap()]));
    assert!(text.starts_with("chain 1 <-[+inf]-> 2"), "{text}");
    assert!(text.contains("bound degenerate-zero"));
    let text = stdout(&sicb(&["explain-chain", f.path().to_str().unwrap(), "--set", "1,2"]));
    assert!(text.contains("h = +inf"));
    let out = sicb(&["explain-chain", f.path().to_str().unwrap(), "--set", "7"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_instances_are_read() {
    let json = fixtures::toy().to_json();
    let f = instance_file(&json);
    let out = sicb(&["bounds", f.path().to_str().unwrap(), "--bounds", "mais"]);
    assert!(out.status.success());
}
