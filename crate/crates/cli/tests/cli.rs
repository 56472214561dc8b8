use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khavinson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn ball_infinity_is_48() {
    let v = json(&["constant", "ball", "--n", "3", "--q", "inf", "--rho", "0.5"]);
    let r = &v["results"][0];
    assert_eq!(r["method"], "SupFormula");
    assert!((r["value"].as_f64().unwrap() - 48.0).abs() < 48.0 * 1e-12);
    assert_eq!(v["command"], "constant");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn halfspace_unit_q_is_one_half() {
    let v = json(&["constant", "halfspace", "--n", "3", "--q", "1", "--xn", "2"]);
    assert!((v["results"][0]["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn directional_constant_with_alpha() {
    let v = json(&["constant", "ball", "--n", "3", "--q", "critical", "--rho", "0.3", "--alpha", "1"]);
    let free = json(&["constant", "ball", "--n", "3", "--q", "critical", "--rho", "0.3"]);
    let a = v["results"][0]["value"].as_f64().unwrap();
    let b = free["results"][0]["value"].as_f64().unwrap();
    assert!(((a - b) / b).abs() < 1e-9);
}

#[test]
fn regimes_for_n5() {
    let v = json(&["regimes", "--n", "5", "--qmax", "3"]);
    let got: Vec<(String, String)> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["value"].as_str().unwrap().into(), r["inputs"]["interval"].as_str().unwrap().into()))
        .collect();
    let want = [
        ("Tangential", "(1, 1.25)"),
        ("Radial", "[1.25, 1.5]"),
        ("Gap", "(1.5, 1.75)"),
        ("Radial", "[1.75, 2]"),
    ];
    for (g, w) in got.iter().zip(want) {
        assert_eq!((g.0.as_str(), g.1.as_str()), w);
    }
    assert_eq!(got.last().unwrap().1, "[2.75, 3]");
}

#[test]
fn json_is_byte_identical() {
    for args in [
        &["sweep-alpha", "halfspace", "--n", "4", "--q", "1.7", "--xn", "1.5", "--points", "9", "--output", "json"][..],
        &["sweep-rho", "ball", "--n", "3", "--q", "2", "--points", "6", "--output", "json"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["sweep-alpha", "ball", "--n", "5", "--q", "1.6", "--rho", "0.4", "--points", "7", "--output", "json"];
    let run_with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_khavinson"))
            .args(args)
            .env("KHAVINSON_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run_with("1");
    let four = run_with("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run_with("zero").status.code(), Some(2));
}

#[test]
fn csv_round_trips() {
    let out = run(&["sweep-alpha", "ball", "--n", "4", "--q", "3", "--rho", "0.6", "--points", "5", "--output", "csv"]);
    assert!(out.status.success());
    let v = json(&["sweep-alpha", "ball", "--n", "4", "--q", "3", "--rho", "0.6", "--points", "5"]);
    let mut rd = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rd.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "value").unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for (row, rec) in rows.iter().zip(v["results"].as_array().unwrap()) {
        let parsed: f64 = row[col].parse().unwrap();
        assert_eq!(parsed, rec["value"].as_f64().unwrap());
    }
}

#[test]
fn validation_errors_exit_2() {
    let cases: [&[&str]; 6] = [
        &["constant", "ball", "--n", "3", "--q", "2", "--rho", "0.9999999"],
        &["constant", "ball", "--n", "3", "--q", "2", "--xn", "1"],
        &["constant", "halfspace", "--n", "3", "--q", "2"],
        &["constant", "ball", "--n", "2", "--q", "2", "--rho", "0.1"],
        &["constant", "ball", "--n", "3", "--q", "0.5", "--rho", "0.1"],
        &["constant", "ball", "--n", "3", "--q", "2", "--rho", "0.1", "--alpha", "4"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn adjudication_states_the_matching() {
    let v = json(&["adjudicate", "--n", "4", "--q", "1.2"]);
    assert_eq!(v["params"]["resolved"], true);
    assert_eq!(v["results"][0]["diagnostics"]["matches"], "3F2");
    assert_eq!(v["results"][1]["diagnostics"]["matches"], "2F1");
}

#[test]
fn sharpness_attains_constants() {
    let v = json(&["sharpness", "halfspace", "--n", "3", "--q", "2", "--xn", "1"]);
    assert!((v["results"][0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    let caps = json(&["sharpness", "ball", "--n", "3", "--q", "inf", "--rho", "0.5"]);
    let ratios: Vec<f64> = caps["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.windows(2).all(|w| w[0] < w[1] && w[1] <= 1.0));
}

#[test]
fn verify_small_run_passes() {
    let args = ["verify", "--samples", "20000", "--output", "json"];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 11);
    assert!(results.iter().all(|r| r["diagnostics"]["passed"] == true));
    assert_eq!(run(&args).stdout, a.stdout);
}
