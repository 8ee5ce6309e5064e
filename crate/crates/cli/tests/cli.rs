use std::path::Path;
use std::process::{Command, Output};

fn dynfdr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynfdr"))
        .args(args)
        .output()
        .expect("spawn dynfdr")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn analyze_bh_small_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", "0.001\n0.02\n0.5\n0.9\n");
    let out = dynfdr(&["analyze", "--input", &input, "--procedure", "bh"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = stdout_json(&out);
    let r = &json["results"][0];
    assert_eq!(r["procedure"], "bh");
    assert_eq!(r["num_rejected"], 2);
    assert_eq!(r["rejected"], serde_json::json!([1, 2]));
}

#[test]
fn analyze_nothing_below_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", "0.2\n0.4\n0.6\n0.8\n0.95\n");
    let out = dynfdr(&["analyze", "--input", &input, "--procedures", "rb20"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["results"][0]["num_rejected"], 0);
}

#[test]
fn analyze_with_truth_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "p.csv",
        "p,null\n0.0001,0\n0.0004,0\n0.3,1\n0.7,1\n0.001,1\n",
    );
    let json_path = dir.path().join("out.json");
    let out = dynfdr(&[
        "analyze",
        "--input",
        &input,
        "--procedures",
        "bh,orc,rb20,lsl",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(json["m"], 5);
    let results = json["results"].as_array().unwrap();
    assert_eq!(results.len(), 4);
    for r in results {
        assert!(r["false_discoveries"].as_u64().unwrap() <= r["num_rejected"].as_u64().unwrap());
    }
}

#[test]
fn analyze_rejects_out_of_range_value() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", "0.1\n1.5\n");
    let out = dynfdr(&["analyze", "--input", &input]);
    assert_ne!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn analyze_unknown_spec_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", "0.1\n");
    let out = dynfdr(&["analyze", "--input", &input, "--procedures", "rb21"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rb20"), "should list valid specs: {err}");
}

#[test]
fn analyze_oracle_needs_pi0() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.txt", "0.01\n0.5\n");
    let out = dynfdr(&["analyze", "--input", &input, "--procedures", "orc"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dynfdr(&[
        "analyze",
        "--input",
        &input,
        "--procedures",
        "orc",
        "--pi0",
        "0.5",
    ]);
    assert!(out.status.success());
}

#[test]
fn simulate_zero_replications_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"m": 100, "pi0": 0.8, "mu": 1, "J": 0, "seed": 1}"#,
    );
    let out = dynfdr(&["simulate", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("J"));
}

#[test]
fn simulate_unknown_config_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"m": 100, "pi0": 0.8, "mu": 1, "J": 10, "seed": 1, "bogus": 3}"#,
    );
    assert_eq!(
        dynfdr(&["simulate", "--config", &config]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_writes_long_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"m": 200, "pi0": [0.5, 0.8], "mu": [1, 2, 4], "J": 50, "seed": 3}"#,
    );
    let csv = dir.path().join("fig.csv");
    let out = dynfdr(&[
        "simulate",
        "--config",
        &config,
        "--procedures",
        "bh,orc,rb20",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scenario,procedure,metric,value,mc_se"));
    assert_eq!(lines.count(), 6 * 3 * 5);
}

#[test]
fn simulate_default_grid_row_count() {
    let out = dynfdr(&["simulate"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // 12 scenarios, 6 procedures, 5 metrics
    assert_eq!(text.lines().count(), 1 + 12 * 6 * 5);
}

#[test]
fn verify_binomial_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("checks.csv");
    let out = dynfdr(&[
        "verify",
        "--suite",
        "lemma2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("suite,check,statistic,relation,bound,tolerance,pass"));
    assert!(!text.contains(",false"));
}

#[test]
fn verify_all_passes_with_default_seed() {
    let out = dynfdr(&["verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let out = dynfdr(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lemma2"));
}
