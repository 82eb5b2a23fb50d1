use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const INSTANCE: &str = r#"{
    "f1": {"family": "quadratic", "params": {"a": 2.0, "b": 1.0}, "mu": 1, "L": 3},
    "f2": {"family": "pw1d", "params": {"breakpoints": [0.0],
           "pieces": [{"a": 0.5, "b": 0.0, "c": 0.0}, {"a": 0.5, "b": 1.0, "c": 0.0}]},
           "mu": 0, "L": "inf"}
}"#;

const PGD_INSTANCE: &str = r#"{
    "phi": {"family": "quadratic", "params": {"a": [[1.0, 0.0], [0.0, -0.5]]}, "mu": -0.5, "L": 1},
    "h": {"family": "quadratic", "params": {"a": [[0.2, 0.0], [0.0, 0.2]], "b": [1.0, 0.0]}, "mu": 0.2, "L": 0.3},
    "gamma": 0.8
}"#;

fn dc_rates(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dc-rates"))
        .args(args)
        .env_remove("DC_RATES_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const P1: [&str; 8] = ["--mu1", "1", "--L1", "2", "--mu2", "0.5", "--L2", "3"];
const P3: [&str; 8] = ["--mu1", "1", "--L1", "2", "--mu2", "-0.5", "--L2", "3"];
const P4: [&str; 8] = ["--mu1", "1", "--L1", "2", "--mu2", "-0.4", "--L2", "0.9"];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

#[test]
fn classify_reports_regime_and_coefficient() {
    let o = dc_rates(&with(&["classify"], &P1));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "dc-rates/1");
    assert_eq!(v["regime"], "p1");
    assert!((v["p"].as_f64().unwrap() - 1.6).abs() < 1e-12);
    assert!((v["bound"].as_f64().unwrap() - 1.0 / 3.1).abs() < 1e-12);

    let o = dc_rates(&with(&["classify", "--out", "csv"], &P1));
    let (h, rows) = csv_rows(&o);
    assert_eq!(h, ["regime", "p", "denominator", "bound", "proven", "status"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "p1");
}

#[test]
fn infinite_curvature_is_accepted() {
    let o = dc_rates(&["classify", "--mu1", "1", "--L1", "inf", "--mu2", "0", "--L2", "inf"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["curvatures"]["L2"], "inf");
}

#[test]
fn conjectured_rate_is_flagged() {
    let o = dc_rates(&with(&["rate", "--N", "3"], &P3));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["proven"], false);
    assert_eq!(v["proven_bound"]["proven"], true);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("CONJECTURE"));

    let o = dc_rates(&with(&["rate", "--N", "3"], &P4));
    let v = json(&o);
    assert_eq!(v["proven"], true);
    assert!(o.stderr.is_empty());
    assert!(v["bound"].as_f64().unwrap() < v["bounds"][0]["bound"].as_f64().unwrap());
}

#[test]
fn symbolic_certificate_exit_codes() {
    let o = dc_rates(&with(&["verify-certificate", "--lemma", "p4"], &P4));
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["valid"], true);

    let o = dc_rates(&with(&["verify-certificate", "--lemma", "p4", "--exact"], &P4));
    assert_eq!(code(&o), 0);

    // the p1 certificate needs both functions convex
    let o = dc_rates(&with(&["verify-certificate", "--lemma", "p1"], &P4));
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["valid"], false);

    let o = dc_rates(&with(&["verify-certificate", "--lemma", "p2", "--out", "csv"], &P1));
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&dc_rates(&["classify", "--mu1", "x", "--L1", "2", "--mu2", "0", "--L2", "3"])), 1);
    assert_eq!(code(&dc_rates(&["classify", "--mu1", "1"])), 1);
    assert_eq!(code(&dc_rates(&["frobnicate"])), 1);
    // mu2 > L2
    assert_eq!(code(&dc_rates(&["rate", "--mu1", "1", "--L1", "2", "--mu2", "3", "--L2", "1"])), 1);
    assert_eq!(code(&dc_rates(&["verify-certificate", "--lemma", "p9", "--mu1", "1", "--L1", "2", "--mu2", "0", "--L2", "3"])), 1);
    assert_eq!(code(&dc_rates(&["verify-certificate", "--lemma", "p1"])), 1);
    assert_eq!(code(&dc_rates(&["run", "--instance", "/nonexistent.json", "--x0", "0"])), 1);
    assert_eq!(code(&dc_rates(&["--help"])), 0);
}

#[test]
fn run_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let o = dc_rates(&["run", "--instance", &inst, "--x0", "-3", "--iters", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = json(&o);
    assert_eq!(run["regime"]["regime"], "p1");
    assert_eq!(run["interpolation"]["f1_violations"], 0);
    assert_eq!(run["interpolation"]["f2_violations"], 0);
    let slacks: Vec<f64> = serde_json::from_value(run["slacks"]["values"].clone()).unwrap();
    assert_eq!(slacks.len(), 6);
    let saved = write(dir.path(), "run.json", &String::from_utf8(o.stdout).unwrap());

    let o = dc_rates(&["verify-certificate", "--from-trajectory", &saved]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["valid"], true);
    let again: Vec<f64> = serde_json::from_value(v["slacks"].clone()).unwrap();
    for (a, b) in slacks.iter().zip(&again) {
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    // a bare trajectory works as well
    let bare = write(dir.path(), "bare.json", &run["trajectory"].to_string());
    assert_eq!(code(&dc_rates(&["verify-certificate", "--from-trajectory", &bare])), 0);

    // curvature flags conflict with a trajectory
    let o = dc_rates(&["verify-certificate", "--from-trajectory", &saved, "--mu1", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn tampered_trajectory_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let o = dc_rates(&["run", "--instance", &inst, "--x0", "-3", "--iters", "4"]);
    let mut run = json(&o);
    // claim f1 is much more curved than it is
    run["trajectory"]["meta"]["curvatures"]["mu1"] = Value::from(2.9);
    let path = write(dir.path(), "bad.json", &run.to_string());
    let o = dc_rates(&["verify-certificate", "--from-trajectory", &path]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["valid"], false);
}

#[test]
fn run_csv_has_one_row_per_iterate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let o = dc_rates(&["run", "--instance", &inst, "--x0", "2", "--iters", "3", "--out", "csv"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv_rows(&o);
    assert_eq!(h, ["k", "x", "F", "g1", "g2", "gap_to_bound"]);
    assert_eq!(rows.len(), 5);
    for r in &rows[..4] {
        assert!(r[5].parse::<f64>().unwrap() >= -1e-9);
    }
    assert_eq!(rows[4][5], "");
}

#[test]
fn pgd_instance_runs() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "pgd.json", PGD_INSTANCE);
    let o = dc_rates(&["run", "--instance", &inst, "--x0", "1,-1", "--iters", "4", "--metric", "residual"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["metric"]["name"], "residual");
    assert_eq!(v["trajectory"]["points"].as_array().unwrap().len(), 6);

    let o = dc_rates(&["run", "--instance", &inst, "--x0", "1", "--iters", "4"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn search_is_seeded_from_the_environment() {
    let args = with(&["search-worstcase", "--N", "1", "--budget", "4", "--family", "interp:1", "--no-witness"], &P1);
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_dc-rates"));
        c.args(&args).env_remove("DC_RATES_SEED");
        if let Some(s) = seed {
            c.env("DC_RATES_SEED", s);
        }
        let o = c.output().unwrap();
        assert_eq!(code(&o), 0);
        json(&o)
    };
    let a = run(Some("11"));
    let b = run(Some("11"));
    assert_eq!(a["seed"], 11);
    assert_eq!(a["best_ratio"], b["best_ratio"]);
    assert_eq!(run(None)["seed"], 0);
    assert!(a["witness"].is_null());
    let r = a["best_ratio"].as_f64().unwrap();
    assert!(r > 0.5 && r <= 1.0 + 1e-9);
}

#[test]
fn search_csv_and_banner() {
    let o = dc_rates(&with(&["search-worstcase", "--N", "2", "--budget", "2", "--out", "csv"], &P3));
    assert_eq!(code(&o), 0);
    let (h, rows) = csv_rows(&o);
    assert_eq!(h[0], "regime");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "p3");
}

#[test]
fn sweep_defaults_to_csv() {
    let o = dc_rates(&["sweep", "--mu2-ratios", "-0.5,0.5", "--L2-ratios", "1:3:2", "--budget", "2"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv_rows(&o);
    assert_eq!(h, ["mu2_ratio", "L2_ratio", "regime", "bound", "best_ratio"]);
    assert_eq!(rows.len(), 4);

    let o = dc_rates(&["sweep", "--mu2-ratios", "0.5", "--L2-ratios", "3", "--budget", "1", "--out", "json"]);
    assert_eq!(json(&o)["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn schedule_shifts() {
    let o = dc_rates(&["schedule", "--mu1", "1", "--L2", "2", "--mu2", "0.5", "--gammas", "0.5,0.4"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let l: Vec<f64> = serde_json::from_value(v["lambdas"].clone()).unwrap();
    assert_eq!(l.len(), 2);
    let o = dc_rates(&["schedule", "--mu1", "1", "--L2", "2", "--mu2", "0.5", "--gammas", "0.5", "--out", "csv"]);
    let (h, rows) = csv_rows(&o);
    assert_eq!(h, ["k", "gamma", "lambda"]);
    assert_eq!(rows.len(), 1);
}
