use std::process::{Command, Output};

use serde_json::Value;

fn gtlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn bounds_report_by_name() {
    let out = gtlab(&["bounds", "--n", "100", "--d", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let stirling = v
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["bound_name"] == "stirling")
        .unwrap();
    assert!((stirling["value"].as_f64().unwrap() - 43.7386).abs() < 1e-3);
}

#[test]
fn oracle_value() {
    let out = gtlab(&["oracle", "--n", "4", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["minimax"], 3);
    assert_eq!(
        gtlab(&["oracle", "--n", "12", "--d", "6"]).status.code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_two() {
    let out = gtlab(&["run", "--alg", "zu", "--n", "4", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(
        gtlab(&["run", "--alg", "nope", "--n", "4"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gtlab(&["run", "--alg", "zu", "--n", "4", "--defectives", "9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gtlab(&["bounds", "--n", "4", "--d", "1", "--rho", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn single_runs() {
    let out = gtlab(&[
        "run",
        "--alg",
        "zc",
        "--n",
        "30",
        "--defectives",
        "2,9,20",
        "--emit-transcript",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["correct"], true);
    let records = v["transcript"]["records"].as_array().unwrap().len();
    assert_eq!(v["tests_used"].as_u64().unwrap() as usize, records);

    let a = gtlab(&[
        "run",
        "--alg",
        "zd",
        "--n",
        "50",
        "--d-random",
        "6",
        "--seed",
        "9",
    ]);
    let b = gtlab(&[
        "run",
        "--alg",
        "zd",
        "--n",
        "50",
        "--d-random",
        "6",
        "--seed",
        "9",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["defectives"].as_array().unwrap().len(), 6);
}

#[test]
fn analysis_violation_exits_one() {
    let out = gtlab(&["run", "--alg", "zu", "--n", "9", "--defectives", "1,6,7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        json(&out)["analysis"]["violations"][0]["check"],
        "tuple_budget"
    );
}

#[test]
fn worstcase_modes() {
    let out = gtlab(&["worstcase", "--alg", "zu", "--n", "10", "--d", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["worst_tests"].as_u64().unwrap() <= 14);
    let out = gtlab(&[
        "worstcase",
        "--alg",
        "zc",
        "--n",
        "300",
        "--d",
        "12",
        "--mode",
        "sampled",
        "--samples",
        "100",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["lower_estimate"], true);
    assert_eq!(v["bound_values"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_is_worker_independent() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_gtlab"))
            .args(["verify", "--n-max", "9"])
            .env("GTLAB_WORKERS", workers)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn verify_exit_status_and_csv() {
    let dir = env!("CARGO_TARGET_TMPDIR");
    let path = format!("{dir}/grid8.csv");
    let out = gtlab(&["verify", "--n-max", "8", "--out", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("algorithm,n,d,worst_tests,bound_name,bound_value,pass")
    );
    assert!(!text.contains(",false"));

    // the per-tuple budget fails on some up-zig-zag runs from n = 9 on
    let out = gtlab(&["verify", "--n-max", "12", "--algs", "zu"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x["check"] == "analysis"));
    assert!(v["counterexamples"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["failed_check"] == "tuple_budget"));

    let out = gtlab(&["verify", "--n-max", "12", "--no-analysis"]);
    assert_eq!(out.status.code(), Some(0));
}
