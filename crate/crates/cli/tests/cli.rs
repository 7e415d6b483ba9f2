use std::fs;
use std::process::{Command, Output};

fn ulamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ulamlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn correct_report_meets_the_guarantee() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"command": "correct", "group": "cyclic:7", "dim": 3, "delta": 0.01, "seed": 42}"#);
    let out = ulamlab(&["correct", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cols = report["columns"].as_array().unwrap();
    let at = cols.iter().position(|c| c == "distance").unwrap();
    for row in report["rows"].as_array().unwrap() {
        assert!(row[at].as_f64().unwrap() <= 0.022);
    }
    assert_eq!(report["command"], "correct");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, format) in [("correct", "json"), ("rolli", "csv"), ("induce-compress", "json"), ("stabilize", "csv")] {
        let a = dir.path().join(format!("{cmd}-a.{format}"));
        let b = dir.path().join(format!("{cmd}-b.{format}"));
        for p in [&a, &b] {
            let out = ulamlab(&[cmd, "--seed", "5", "--format", format, "--out", p.to_str().unwrap()]);
            assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        }
        assert!(fs::read(&a).unwrap() == fs::read(&b).unwrap(), "{cmd} reports differ");
    }
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "w.json", r#"{"command": "witness-scan", "group": "cyclic:5", "delta": [0.1]}"#);
    let out = ulamlab(&["witness-scan", "--config", &cfg, "--group", "cyclic:3", "--delta", "0.2,0.4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // two non-identity elements for each of two deltas
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("2.0000000000000001e-1,"));
}

#[test]
fn schema_errors_exit_two_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "bad.json", r#"{"command": "correct", "dim": -3}"#);
    let out = ulamlab(&["correct", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let diag: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["kind"], "usage");
    assert!(diag["detail"].as_str().unwrap().contains("dim"));

    let cfg = write_config(&dir, "unknown.json", r#"{"command": "correct", "epsilon": 0.1}"#);
    let out = ulamlab(&["correct", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}

#[test]
fn command_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "r.json", r#"{"command": "rolli"}"#);
    let out = ulamlab(&["correct", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_group_is_a_usage_error() {
    let out = ulamlab(&["correct", "--group", "klein:4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_range_parameters_are_usage_errors() {
    assert_eq!(ulamlab(&["rolli", "--delta", "3.0"]).status.code(), Some(2));
    assert_eq!(ulamlab(&["stabilize", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(ulamlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn witness_scan_matches_golden_files() {
    for (format, golden) in [
        ("csv", include_str!("golden/witness_scan_c4.csv")),
        ("json", include_str!("golden/witness_scan_c4.json")),
    ] {
        let out = ulamlab(&["witness-scan", "--group", "cyclic:4", "--delta", "0.1,0.5", "--format", format]);
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap(), golden, "{format}");
    }
}
