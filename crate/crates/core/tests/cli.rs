use std::process::{Command, Output};

use serde_json::Value;

fn rrw(args: &[&str]) -> Output {
    rrw_threads(args, None)
}

fn rrw_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rrw"));
    cmd.args(args).env_remove("RRW_THREADS");
    if let Some(t) = threads {
        cmd.env("RRW_THREADS", t);
    }
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().next().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not one JSON line ({e}): {text}"))
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(file.path(), text).unwrap();
    file
}

#[test]
fn success_writes_csv_with_provenance() {
    let o = rrw(&["urn", "--f", "polya", "--N", "3", "--seed", "9"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# rrw "));
    assert_eq!(lines[1], "# command: urn");
    let config: Value = serde_json::from_str(lines[2].strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["seed"], 9);
    assert_eq!(config["f"], "polya");
    assert_eq!(lines[3], "n,alpha,l,draw");
    assert_eq!(lines.len(), 8);
}

#[test]
fn json_output_has_envelope() {
    let o = rrw(&["analyze", "--f", "mix", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["rrw", "result"]);
    assert_eq!(doc["rrw"]["command"], "analyze");
    assert_eq!(doc["rrw"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["rrw"]["config"]["f"], "mix");
}

#[test]
fn usage_errors_exit_2() {
    let o = rrw(&["urn", "--bogus"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["error"], "UsageError");
    let o = rrw(&["urn", "--f", "x +"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn precondition_errors_exit_3() {
    let o = rrw(&["solomon", "--f", "mix"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "NotLinear");
    let o = rrw(&["urn", "--f", "polya", "--alpha0", "1.5"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn budget_cap_exits_4_and_still_writes() {
    let o = rrw(&["walk", "simulate", "--f", "const(0.5)", "--hit", "50", "--cap", "100"]);
    assert_eq!(code(&o), 4);
    assert_eq!(stderr_json(&o)["error"], "BudgetExhausted");
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("# rrw "));
}

#[test]
fn flag_seed_beats_config_seed() {
    let file = config_file(r#"{"seed": 1, "f": "polya", "N": 20}"#);
    let path = file.path().to_str().unwrap();
    let o = rrw(&["urn", "--config", path, "--seed", "2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rrw"]["config"]["seed"], 2);
    assert_eq!(doc["rrw"]["config"]["N"], 20);
    let direct = rrw(&["urn", "--f", "polya", "--N", "20", "--seed", "2", "--format", "json"]);
    assert_eq!(o.stdout, direct.stdout);
}

#[test]
fn empty_config_gives_defaults() {
    let file = config_file("{}");
    let path = file.path().to_str().unwrap();
    let with = rrw(&["analyze", "--f", "mix", "--config", path]);
    let without = rrw(&["analyze", "--f", "mix"]);
    assert_eq!(code(&with), 0);
    assert_eq!(with.stdout, without.stdout);
}

#[test]
fn unknown_config_key_is_named() {
    let file = config_file(r#"{"f": "polya", "bogus_key": 3}"#);
    let path = file.path().to_str().unwrap();
    let o = rrw(&["urn", "--config", path]);
    assert_eq!(code(&o), 2);
    let err = stderr_json(&o);
    assert_eq!(err["error"], "ConfigError");
    assert!(err["detail"].as_str().unwrap().contains("bogus_key"), "{err}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("urn.csv");
    let o = rrw(&["urn", "--f", "polya", "--N", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# rrw "));
    assert!(!text.contains("urn.csv"));
}

#[test]
fn output_is_identical_across_thread_counts() {
    let cases: [&[&str]; 3] = [
        &["drift", "estimate", "--f", "quartic(2)", "--N-dp", "500", "--N", "2000", "--replicas", "64", "--seed", "4"],
        &["walk", "functionals", "--f", "mix", "--a", "3", "--replicas", "50", "--seed", "4"],
        &["couple", "--kind", "function-order", "--f", "const(0.4)", "--g", "quartic(2)", "--N", "500", "--streams", "8"],
    ];
    for args in cases {
        let one = rrw_threads(args, Some("1"));
        let four = rrw_threads(args, Some("4"));
        assert_eq!(code(&one), 0, "{args:?}: {}", String::from_utf8_lossy(&one.stderr));
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}
