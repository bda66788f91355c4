//! End-to-end checks of the binary: exit codes, formats, batch ordering.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SKEWED: &str = "\
schema_version = 1

[cluster]
initial_loads = [0, 0, 69, 70]
";

const MILD: &str = "\
schema_version = 1

[cluster]
initial_loads = [4, 9, 32, 40]
";

const BROKEN: &str = "\
schema_version = 1

[cluster]
initial_loads = [4, -9]

[[failures]]
tick = 1
node = 7
";

fn loadshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loadshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_prints_metrics_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "skewed.toml", SKEWED);
    let out = loadshift(&["run", &file]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("scenario_id"));
    assert!(stdout.contains("skewed"));
    assert!(stdout.contains("2.0000"));
}

#[test]
fn run_emits_parseable_json() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "skewed.toml", SKEWED);
    let out = loadshift(&["run", &file, "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value[0]["scenario_id"], "skewed");
    assert_eq!(value[0]["report"]["response_time_recovered"], 35);
    assert_eq!(value[0]["report"]["response_time_baseline"], 70);
}

#[test]
fn run_rejects_unknown_formats() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "skewed.toml", SKEWED);
    let out = loadshift(&["run", &file, "--format", "xml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_on_a_missing_file_is_a_validation_failure() {
    let out = loadshift(&["run", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn epsilon_override_wins_over_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "skewed.toml", SKEWED);
    // With a target spread of 70 the input is already "level": no passes,
    // no improvement.
    let out = loadshift(&["run", &file, "--epsilon", "70", "--format", "csv"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row = stdout.lines().nth(1).unwrap();
    assert_eq!(row, "skewed,70,70,1.0000,0,0,0,0");
}

#[test]
fn validate_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "broken.toml", BROKEN);
    let out = loadshift(&["validate", &file]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("cluster.initial_loads[1]"));
    assert!(stderr.contains("failures[0].node"));
}

#[test]
fn validate_accepts_a_clean_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "mild.toml", MILD);
    let out = loadshift(&["validate", &file]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ok (4 nodes"));
}

#[test]
fn batch_runs_in_file_name_order_and_flags_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a_mild.toml", MILD);
    write(dir.path(), "b_broken.toml", BROKEN);
    write(dir.path(), "c_skewed.toml", SKEWED);
    write(dir.path(), "notes.txt", "not a scenario");

    let out = loadshift(&["batch", &dir.path().to_string_lossy(), "--format", "csv"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "a bad config makes the batch a validation failure"
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3, "header plus one row per good scenario");
    assert!(lines[1].starts_with("a_mild,"));
    assert!(lines[2].starts_with("c_skewed,"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("b_broken"));
}

#[test]
fn parallel_batch_matches_sequential_output() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..6 {
        write(
            dir.path(),
            &format!("s{i}.toml"),
            &format!("schema_version = 1\n\n[cluster]\ninitial_loads = [{i}, 20, 50, 70]\n"),
        );
    }
    let dir_arg = dir.path().to_string_lossy().into_owned();
    let sequential = loadshift(&["batch", &dir_arg, "--format", "csv"]);
    let parallel = loadshift(&["batch", &dir_arg, "--format", "csv", "--parallelism", "4"]);
    assert!(sequential.status.success());
    assert!(parallel.status.success());
    assert_eq!(sequential.stdout, parallel.stdout);
}

#[test]
fn empty_batch_directory_succeeds_with_a_bare_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = loadshift(&["batch", &dir.path().to_string_lossy()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1);
}

#[test]
fn a_scenario_that_fails_at_runtime_exits_one() {
    // Valid file, but every node dies: recovery has nowhere to put the work.
    let doomed = "\
schema_version = 1

[cluster]
initial_loads = [5, 5]

[[failures]]
tick = 1
node = 0

[[failures]]
tick = 2
node = 1
";
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "doomed.toml", doomed);
    let out = loadshift(&["run", &file]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("error: no alive nodes"));
}

#[test]
fn compare_summarizes_improvements() {
    let dir = tempfile::tempdir().unwrap();
    let mild = write(dir.path(), "mild.toml", MILD);
    let skewed = write(dir.path(), "skewed.toml", SKEWED);
    let out = loadshift(&["compare", &mild, &skewed]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("improved 2/2 scenarios"));
    assert!(stdout.contains("mild"));
    assert!(stdout.contains("skewed"));
}
