use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotransport")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn quick_suite_passes() {
    let out = run(&["suite", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().filter(|l| l.starts_with("[PASS]")).count() >= 7);
    assert!(!stderr.contains("[FAIL]"));
}

#[test]
fn verify_chain_on_cycle() {
    let out = run(&["verify-chain", "cycle:6", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["config"]["p"][0], 2.0);
}

#[test]
fn counterexample_counts() {
    let out = run(&["counterexample", "--n", "10", "--j", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert_eq!(r["full_size"], 10240);
    assert_eq!(r["full_boundary"], 2048);
    assert_eq!(r["log"]["translates"], 64);
    assert_eq!(r["size"], 10048);
    assert_eq!(r["boundary"], 2240);
    assert_eq!(r["inradius"], 4);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["gen", "moebius:3"][..], &["frobnicate"], &["walk", "lamplighter", "--fit", "100"], &["verify-chain", "cycle:6", "--p", "0.5"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = run(&["gen", "moebius:3"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn outputs_are_deterministic() {
    for args in [&["gen", "random-regular:n=10,d=3,seed=4"][..], &["constants", "petersen", "--p", "1.5,3"], &["transport", "--n", "4", "--format", "csv"]] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_outputs() {
    let out = run(&["walk", "lamplighter", "--k-max", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,rho,loss");
    assert_eq!(lines.len(), 12);
    let rho2: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!((rho2 - 1.0 / 3.0).abs() < 1e-15);
    let out = run(&["profile", "cycle:8", "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("x,F,G,Gdown,exact\n"));
}
