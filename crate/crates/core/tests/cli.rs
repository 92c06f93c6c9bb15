use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use msk::scenario::{parse_scenario, run, RunOptions};
use serde_json::Value;

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn corpus() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(manifest("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

fn msk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msk")).args(args).output().unwrap()
}

fn msk_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_msk"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn bundled_scenarios_pass() {
    for f in corpus() {
        let out = msk(&["run", f.to_str().unwrap(), "--format", "json"]);
        let report = json(&out);
        assert_eq!(out.status.code(), Some(0), "{}: {report:#}", f.display());
        let s = &report["summary"];
        assert_eq!(s["fail"], 0);
        assert_eq!(s["error"], 0);
    }
}

#[test]
fn scenarios_round_trip_through_canonical_json() {
    for f in corpus() {
        let s = parse_scenario(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let again = parse_scenario(&s.to_json()).unwrap();
        assert_eq!(s.to_json(), again.to_json(), "{}", f.display());
        let opts = RunOptions::default();
        assert_eq!(run(&s, &opts).unwrap().to_json(), run(&again, &opts).unwrap().to_json());
    }
}

#[test]
fn failing_scenario_reports_each_status() {
    let out = msk(&["run", manifest("tests/fixtures/failing.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let statuses: Vec<&str> = report["tasks"].as_array().unwrap().iter().map(|t| t["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["pass", "fail", "error"]);
}

#[test]
fn undefined_reference_is_a_usage_error() {
    let out = msk(&["run", manifest("tests/fixtures/undefined_reference.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Omega2"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(msk(&["run"]).status.code(), Some(2));
    assert_eq!(msk(&["run", "does/not/exist.json"]).status.code(), Some(2));
    assert_eq!(msk(&["darboux", "--base-dim", "2"]).status.code(), Some(2));
    assert_eq!(msk(&["darboux", "--base-dim", "2", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(msk(&["darboux", "--base-dim", "3", "--degree", "2", "--horizontal", "1"]).status.code(), Some(2));
    assert_eq!(msk_stdin(&["run", "-"], "{\"schema_version\": 1,").status.code(), Some(2));
    let unknown_task = msk(&["run", corpus()[0].to_str().unwrap(), "--task", "no_such_task"]);
    assert_eq!(unknown_task.status.code(), Some(2));
}

#[test]
fn syntax_errors_carry_a_position() {
    let out = msk_stdin(&["run", "-"], "{\n  \"schema_version\": 1,\n  \"chart\": [\n}");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn single_task_selection() {
    let f = manifest("scenarios/hamiltonian_plane.json");
    let report = json(&msk(&["run", f.to_str().unwrap(), "--task", "coordinate_hamiltonian", "--format", "json"]));
    let tasks = report["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 1);
    assert_eq!(tasks[0]["id"], "coordinate_hamiltonian");
    assert_eq!(tasks[0]["status"], "pass");
}

#[test]
fn seed_controls_randomized_tasks() {
    let f = manifest("scenarios/calculus.json");
    let f = f.to_str().unwrap();
    let a = msk(&["run", f, "--seed", "11", "--format", "json"]);
    let b = msk(&["run", f, "--seed", "11", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 11);
    let default = json(&msk(&["run", f, "--format", "json"]));
    assert_eq!(default["seed"], 7);
}

#[test]
fn timing_is_opt_in() {
    let f = manifest("scenarios/volume_r3.json");
    let plain = json(&msk(&["run", f.to_str().unwrap(), "--format", "json"]));
    assert!(plain["tasks"][0].get("elapsed_ms").is_none());
    let timed = json(&msk(&["run", f.to_str().unwrap(), "--format", "json", "--timing"]));
    assert!(timed["tasks"][0]["elapsed_ms"].is_u64());
}

#[test]
fn text_report_has_a_line_per_task_and_a_summary() {
    let out = msk(&["run", manifest("tests/fixtures/failing.json").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] ok"));
    assert!(text.contains("[FAIL] wrong_expectation"));
    assert!(text.contains("[ERROR] unexpected_error"));
    assert!(text.trim_end().ends_with("1 pass, 1 fail, 1 error, 0 inconclusive"));
}

#[test]
fn darboux_output_runs_cleanly() {
    for args in [
        vec!["--base-dim", "1", "--degree", "1"],
        vec!["--base-dim", "2", "--degree", "2"],
        vec!["--base-dim", "3", "--degree", "1"],
        vec!["--base-dim", "3", "--degree", "2", "--fiber-coords", "x3", "--horizontal", "2"],
    ] {
        let gen = msk(&[&["darboux"], args.as_slice()].concat());
        assert_eq!(gen.status.code(), Some(0), "{args:?}");
        let scenario = String::from_utf8(gen.stdout).unwrap();
        let out = msk_stdin(&["run", "-", "--format", "json"], &scenario);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {:#}", json(&out));
    }
}

#[test]
fn generated_darboux_scenarios_match_the_bundled_copies() {
    let out = msk(&["darboux", "--base-dim", "3", "--degree", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(manifest("scenarios/darboux_n3_k2.json")).unwrap());
}
