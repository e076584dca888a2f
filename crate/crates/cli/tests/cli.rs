use std::process::{Command, Output};

use serde_json::Value;

fn mallows(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mallows"))
        .args(args)
        .env_remove("MALLOWS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn finite_sample_jsonl() {
    let o = mallows(&[
        "sample", "--mode", "finite", "--n", "5", "--q", "0.5", "--count", "3", "--seed", "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let header: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["mode"], "finite");
    assert_eq!(header["seed"], 1);
    assert_eq!(header["window"], "1:5");
    assert!(header["eps_tv"].is_null());
    for line in &lines[1..] {
        let w: Value = serde_json::from_str(line).unwrap();
        let mut vals: Vec<i64> = w["values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_i64().unwrap())
            .collect();
        vals.sort_unstable();
        assert_eq!(vals, vec![1, 2, 3, 4, 5]);
    }
}

#[test]
fn output_is_reproducible() {
    let args = [
        "sample",
        "--mode",
        "two-sided",
        "--window=-5:5",
        "--q",
        "0.7",
        "--count",
        "20",
        "--seed",
        "42",
    ];
    let a = mallows(&args);
    let b = mallows(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = mallows(&[
        "sample",
        "--mode",
        "two-sided",
        "--window=-5:5",
        "--q",
        "0.7",
        "--count",
        "20",
        "--seed",
        "43",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_from_environment() {
    let args = [
        "sample",
        "--mode",
        "one-sided",
        "--n",
        "8",
        "--q",
        "0.4",
        "--count",
        "5",
    ];
    let env = Command::new(env!("CARGO_BIN_EXE_mallows"))
        .args(args)
        .env("MALLOWS_SEED", "9")
        .output()
        .unwrap();
    let mut explicit = args.to_vec();
    explicit.extend(["--seed", "9"]);
    assert_eq!(env.stdout, mallows(&explicit).stdout);
}

#[test]
fn inversion_sampler_csv() {
    let o = mallows(&[
        "sample",
        "--mode",
        "two-sided",
        "--window",
        "-2:2",
        "--q",
        "0.5",
        "--sampler",
        "inversion",
        "--eps-tv",
        "1e-6",
        "--format",
        "csv",
        "--count",
        "2",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sample,position,value");
    assert_eq!(lines.len(), 1 + 2 * 5);
    assert!(lines[1].starts_with("0,-2,"));
}

#[test]
fn displacement_table() {
    let o = mallows(&["pmf", "displacement", "--q", "0.5", "--radius", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,probability");
    assert_eq!(lines.len(), 1 + 21 + 1);
    assert!(lines[22].starts_with("tail_bound,"));
    let p0: f64 = lines[11].strip_prefix("0,").unwrap().parse().unwrap();
    assert!((p0 - 0.2206430360965328).abs() < 1e-12);
}

#[test]
fn fdd_json() {
    let o = mallows(&["pmf", "fdd", "--q", "0.5", "--d", "0,0", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["query"]["d"], serde_json::json!([0, 0]));
    assert!((v["value"].as_f64().unwrap() - 0.081347313726).abs() < 1e-10);
    assert!(v["error_bound"].as_f64().unwrap() <= 1e-12);
    let o = mallows(&["pmf", "fdd", "--q", "0.5", "--d", "-1,1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.032482269587).abs() < 1e-10);
}

#[test]
fn verify_passes_and_reports() {
    let o = mallows(&[
        "verify",
        "--suite",
        "finite-oracle",
        "--q",
        "0.5",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["overall_pass"], true);
    assert_eq!(r["cases"].as_array().unwrap().len(), 4);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["sample", "--mode", "finite", "--q", "0.5"],
        vec!["sample", "--mode", "finite", "--n", "3", "--q", "1.5"],
        vec![
            "sample",
            "--mode",
            "two-sided",
            "--window",
            "3:1",
            "--q",
            "0.5",
        ],
        vec!["verify", "--suite", "nope", "--q", "0.5"],
        vec!["pmf", "fdd", "--q", "0.5"],
        vec!["bench", "--op", "nope"],
        vec!["frobnicate"],
    ] {
        let o = mallows(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bench_reports() {
    let o = mallows(&["bench", "--op", "young", "--reps", "10"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["op"], "young");
    assert_eq!(v["reps"], 10);
}
