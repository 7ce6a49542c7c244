use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasijacobi")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn expand_eisenstein() {
    let out = run(&["expand", "--function", "G_4", "--order", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // constant term 1/720 at (2πi)^4, then 2/3! σ_3(n)
    assert_eq!(v["series"]["coeffs"][0], serde_json::json!([[4, "1/720"]]));
    assert_eq!(v["series"]["coeffs"][1], serde_json::json!([[4, "1/3"]]));
    assert_eq!(v["series"]["coeffs"][2], serde_json::json!([[4, "3"]]));
}

#[test]
fn expand_p2_has_double_pole_layer() {
    let out = run(&["expand", "--function", "P_2", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["layers"].as_array().unwrap().len(), 4);
    let l0 = v["layers"][0]["display"].as_str().unwrap();
    assert!(l0.contains("(1-ζ)^2"), "{l0}");
}

#[test]
fn expand_wp_laurent() {
    let out = run(&["expand", "--function", "wp_2", "--order", "2", "--z-order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let zs: Vec<i64> = v["terms"].as_array().unwrap().iter().map(|t| t["z"].as_i64().unwrap()).collect();
    assert_eq!(zs, vec![-2, 2]);
}

#[test]
fn unknown_function_is_a_usage_error() {
    let out = run(&["expand", "--function", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(run(&["expand"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify-suite", "nosuch"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for name in ["combinatorics", "hha-weight2", "hha-weight1", "elliptic-formal"] {
        let out = run(&["verify-suite", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["suite"], name);
        assert_eq!(v["failed"], 0);
        assert!(v["cases"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    }
    let out = run(&["verify-suite", "lattice-oracle", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["cases"].as_array().unwrap().iter().all(|c| c["exact_diff"] == "0"));
}

#[test]
fn reports_are_byte_identical() {
    let a = run(&["verify-suite", "elliptic-numeric", "--seed", "3"]);
    let b = run(&["verify-suite", "elliptic-numeric", "--seed", "3", "--sequential"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["tolerance"], 1e-6);
    assert_eq!(v["truncation"]["q"], 60);
}

#[test]
fn impossible_tolerance_fails_with_exit_1() {
    let out = run(&["verify-suite", "elliptic-numeric", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["failed"].as_u64().unwrap() > 0);
}

#[test]
fn anomaly_weight2() {
    let out = run(&["anomaly", "--spec", &data("weight2.json"), "--correlator", "x0^2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out), serde_json::json!({"k1": [["4", "F(x0^1)"]]}));
    let out = run(&["anomaly", "--spec", "weight2", "--correlator", "x0^3"]);
    assert_eq!(json(&out), serde_json::json!({"k1": [["12", "F(x0^2)"]], "k2": [["24", "F(x0^1)"]]}));
}

#[test]
fn reduce_weight1_pairing() {
    let out = run(&["reduce", "--spec", &data("weight1.json"), "--correlator", "a0^2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let terms = v["expression"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    let symbols: Vec<&str> = terms.iter().map(|t| t[1].as_str().unwrap()).collect();
    assert!(symbols.contains(&"F(1)"), "{symbols:?}");
    assert!(v["display"].as_str().unwrap().contains("P_2"));
}

#[test]
fn reduce_rejects_bad_positions() {
    let out = run(&["reduce", "--spec", "weight2", "--correlator", "x0^2", "--positions", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_spec_file_is_a_usage_error() {
    let out = run(&["anomaly", "--spec", "/nonexistent/spec.json", "--correlator", "x0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lattice_trace_with_oracle() {
    let out = run(&["lattice-trace", "--lattice", "e8", "--n", "2", "--order", "3", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["closed_form"], v["oracle"]);
    let out = run(&["lattice-trace", "--lattice", "e8x3", "--order", "2"]);
    let v = json(&out);
    assert_eq!(v["closed_form"]["offset"], "-1");
    assert_eq!(v["closed_form"]["coeffs"][1], serde_json::json!([[0, "744"]]));
}

#[test]
fn lattice_trace_from_file_and_direction() {
    let out = run(&[
        "lattice-trace",
        "--lattice",
        &data("a1x2.json"),
        "--direction",
        "1/2,1/2",
        "--n",
        "3",
        "--order",
        "3",
        "--oracle",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["equal"], true);
    let out = run(&["lattice-trace", "--lattice", &data("a1x2.json"), "--direction", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transform_check() {
    let out = run(&["transform-check", "--function", "P_3", "--gamma", "0,-1,1,0", "--z", "0.2+0.3i", "--tau", "1.1i"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    let out = run(&["transform-check", "--function", "P_3", "--gamma", "1,1,1,1", "--z", "0.2", "--tau", "1.1i"]);
    assert_eq!(out.status.code(), Some(2));
}
