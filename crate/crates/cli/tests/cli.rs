use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn write(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn pcs(args: &[&str], budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pcs"));
    cmd.args(args).env_remove("PCS_BUDGET");
    if let Some(b) = budget {
        cmd.env("PCS_BUDGET", b);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn second() -> PathBuf {
    write("cli-ex2.json", r#"{"m": 1, "n": 2, "phi": [["5", "1"]], "b": ["2"]}"#)
}

#[test]
fn malformed_file_names_the_field() {
    let bad = write("cli-bad-entry.json", r#"{"m": 1, "n": 2, "phi": [["5", "x"]], "b": ["2"]}"#);
    let out = pcs(&["analyze", bad.to_str().unwrap()], None);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("phi[0][1]"), "{}", stderr(&out));

    let bad = write("cli-bad-json.json", "{\"m\": 1,\n \"n\": }");
    let out = pcs(&["analyze", bad.to_str().unwrap()], None);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = pcs(&["analyze", "/nonexistent/instance.json"], None);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_instances_are_rejected() {
    let neg = write("cli-neg.json", r#"{"m": 1, "n": 2, "phi": [[1, -1]], "b": [-1]}"#);
    let out = pcs(&["analyze", neg.to_str().unwrap()], None);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nonnegative_b"), "{}", stderr(&out));

    let rank = write("cli-rank.json", r#"{"m": 2, "n": 2, "phi": [[1, 0], [2, 0]], "b": [1, 1]}"#);
    let out = pcs(&["analyze", rank.to_str().unwrap()], None);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("full_row_rank"), "{}", stderr(&out));
}

#[test]
fn budget_exceeded_has_its_own_exit_code() {
    let path = second();
    let out = pcs(&["analyze", path.to_str().unwrap()], Some("3"));
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = pcs(&["analyze", path.to_str().unwrap()], Some("lots"));
    assert_eq!(code(&out), 2);
}

#[test]
fn solve_commands() {
    let path = second();
    let p = path.to_str().unwrap();
    let out = pcs(&["solve", p, "--problem", "l0"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["l0_solutions"]["solutions"].as_array().unwrap().len(), 4);

    let out = pcs(&["solve", p, "--problem", "lp", "--p", "0.3", "--method", "exact"], None);
    assert_eq!(code(&out), 0);
    let lp = &report(&out)["lp_results"][0];
    assert_eq!(lp["solutions"], serde_json::json!([["-2/5", "0"], ["2/5", "0"]]));
    assert_eq!(lp["method"], "exact-enumeration");

    let out = pcs(
        &["solve", p, "--problem", "lp", "--p", "0.3", "--method", "heuristic", "--restarts", "8", "--seed", "3"],
        None,
    );
    assert_eq!(code(&out), 0);
    let value = report(&out)["lp_results"][0]["optimal_value"].as_f64().unwrap();
    assert!((value - 0.4f64.powf(0.3)).abs() < 1e-6);

    let out = pcs(&["solve", p, "--problem", "lp"], None);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--p"));
    let out = pcs(&["solve", p, "--problem", "lp", "--p", "1.5"], None);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_outcomes() {
    let first = write("cli-ex1.json", r#"{"m": 1, "n": 2, "phi": [[1, -1]], "b": [1]}"#);
    let out = pcs(&["verify", first.to_str().unwrap(), "--p", "0.99"], None);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["verification"][0]["status"], "pass");

    let out = pcs(&["verify", second().to_str().unwrap(), "--p", "0.5"], None);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["verification"][0]["status"], "refused");

    let out = pcs(&["verify", second().to_str().unwrap(), "--p", "0"], None);
    assert_eq!(code(&out), 2);
}

#[test]
fn out_flag_writes_the_report() {
    let target = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-out.json");
    let _ = std::fs::remove_file(&target);
    let out = pcs(&["analyze", second().to_str().unwrap(), "--out", target.to_str().unwrap()], None);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["certificate"]["c1"], "10/13");
    assert!(doc["pseudo_extreme_points"].is_null());

    let out = pcs(&["analyze", second().to_str().unwrap(), "--verbose"], None);
    assert_eq!(report(&out)["pseudo_extreme_points"]["entries"].as_array().unwrap().len(), 12);
}

#[test]
fn decimal_and_fraction_entries_are_exact() {
    let path = write("cli-dec.json", r#"{"m": 1, "n": 2, "phi": [["0.5", "1/10"]], "b": [0.2]}"#);
    let out = pcs(&["analyze", path.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc = report(&out);
    assert_eq!(doc["instance_echo"]["phi"], serde_json::json!([["1/2", "1/10"]]));
    assert_eq!(doc["instance_echo"]["b"], serde_json::json!(["1/5"]));
    // Same geometry as Φ = (5, 1), b = 2 scaled by 1/10.
    assert_eq!(doc["certificate"]["rm"], "2/5");
}

#[test]
fn zero_measurements_give_a_degenerate_certificate() {
    let path = write("cli-zero.json", r#"{"m": 1, "n": 3, "phi": [[1, 2, 3]], "b": [0]}"#);
    let out = pcs(&["analyze", path.to_str().unwrap()], None);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let cert = &report(&out)["certificate"];
    assert_eq!(cert["degenerate"], true);
    assert_eq!(cert["s"], 0);
    assert_eq!(cert["pstar"], 1.0);
    assert!(cert["rm"].is_null());
}

#[test]
fn worked_examples_table_is_stable() {
    let a = pcs(&["paper-examples"], None);
    let b = pcs(&["paper-examples"], None);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).contains("all values match"));
}
