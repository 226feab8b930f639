use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const UNIT_SIGMA: &str = "2.5066282746310002";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kahler-hardy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_model(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn model(dir: &Path, name: &str, d: f64, poles: &str, zeros: &str) -> String {
    let body = format!(r#"{{"sigma": {UNIT_SIGMA}, "d": {d}, "poles": [{poles}], "zeros": [{zeros}]}}"#);
    write_model(dir, name, &body).to_string_lossy().into_owned()
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "status {:?}, stderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn re(v: &Value) -> f64 {
    v[0].as_f64().unwrap()
}

#[test]
fn cepstrum_of_ar1() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "ar.json", 0.0, "[0.5, 0]", "");
    let v = json_stdout(&run(&["cepstrum", "--model", &m, "--truncation", "4"]));
    let c: Vec<f64> = v["coefficients"].as_array().unwrap().iter().map(re).collect();
    let expected = [1.0, 0.5, 0.125, 0.5f64.powi(3) / 3.0, 0.015625];
    for (a, b) in c.iter().zip(expected) {
        assert!((a - b).abs() < 1e-15, "{c:?}");
    }
    assert_eq!(v["kind"], "complex-cepstrum");
    assert!(v["tail_bound"].as_f64().unwrap() < 1e-3);
}

#[test]
fn cepstrum_of_gain_only_and_csv() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "gain.json", 0.0, "", "");
    let out = run(&["cepstrum", "--model", &m, "--truncation", "3", "--output", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "s,value_re,value_im\n0,1.0,0.0\n1,0.0,0.0\n2,0.0,0.0\n3,0.0,0.0\n");
}

#[test]
fn power_cepstrum_and_impulse() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "ar.json", 0.0, "[0.5, 0]", "");
    let v = json_stdout(&run(&["cepstrum", "--model", &m, "--series", "power", "--truncation", "4"]));
    assert!((re(&v["coefficients"][1]) - 0.5).abs() < 1e-12);
    let v = json_stdout(&run(&["impulse", "--model", &m, "--truncation", "3"]));
    assert!((re(&v["coefficients"][3]) - 0.125).abs() < 1e-15);
}

#[test]
fn malformed_inputs_exit_2_naming_the_problem() {
    let dir = TempDir::new().unwrap();
    let bad = write_model(dir.path(), "bad.json", "{not json");
    let out = run(&["cepstrum", "--model", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.json"));
    assert!(out.stdout.is_empty());

    let no_sigma = write_model(dir.path(), "nosigma.json", r#"{"poles": []}"#);
    let out = run(&["metric", "--model", no_sigma.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sigma"));

    let unstable = model(dir.path(), "unstable.json", 0.0, "[0.5, 0], [0.9, 0.9]", "");
    let out = run(&["metric", "--model", &unstable]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("poles[1]"));

    let m = model(dir.path(), "ar.json", 0.0, "[0.5, 0]", "");
    let out = run(&["metric", "--model", &m, "--weight", r#"{"family": "power"}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("weight.m"), "{}", stderr(&out));

    let out = run(&["metric", "--model", &m, "--order-m", "1", "--weight", r#"{"family": "hardy"}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metric_examples() {
    let dir = TempDir::new().unwrap();
    let ar = model(dir.path(), "ar.json", 0.0, "[0.5, 0]", "");
    let v = json_stdout(&run(&["metric", "--model", &ar, "--order-m", "1"]));
    assert!((re(&v["metric"][0][0]) - 16.0 / 9.0).abs() < 1e-12);
    assert!((re(&v["metric_closed"][0][0]) - 16.0 / 9.0).abs() < 1e-14);
    assert_eq!(v["coordinates"][0], "lambda_1");

    let frac = model(dir.path(), "frac.json", 0.2, "", "");
    let v = json_stdout(&run(&["metric", "--model", &frac, "--order-m", "0"]));
    assert!((re(&v["metric"][0][0]) - 1.644_934_066_848_226_4).abs() < 1e-12);

    let out = run(&["metric", "--model", &frac, "--order-m", "1"]);
    assert_eq!(out.status.code(), Some(4));
    let msg = stderr(&out);
    assert!(msg.contains("d = 0.2") && msg.contains("m >= 1"), "{msg}");
    assert!(out.stdout.is_empty());
}

#[test]
fn geometry_reports() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "arma.json", 0.0, "[0.5, 0.1]", "[0.25, -0.2]");
    let v = json_stdout(&run(&["connection", "--model", &m, "--check"]));
    assert!(v["connection"].as_array().unwrap().len() == 2);
    assert!(v["hermitian_residual"].as_f64().unwrap() < 1e-6);
    assert!(v["closed_form_residual"].as_f64().unwrap() < 1e-6);

    let v = json_stdout(&run(&["potential", "--model", &m, "--transform", "identity"]));
    assert!(v["potential"].as_f64().unwrap() > 1.0);
    assert!(v.get("potential_closed").is_none());

    let ar = model(dir.path(), "ar.json", 0.0, "[0.5, 0]", "");
    let v = json_stdout(&run(&["ricci", "--model", &ar, "--order-m", "1"]));
    assert!((re(&v["ricci"][0][0]) + 32.0 / 9.0).abs() < 1e-4);

    let out = run(&["metric", "--model", &ar, "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,i,j,k,value_re,value_im\npotential,,,,"));
    assert!(text.contains("\nmetric,0,0,,"));
}

#[test]
fn degenerate_model_exits_5() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "deg.json", 0.0, "[0.4, 0], [0.4, 0]", "");
    let out = run(&["ricci", "--model", &m]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
    assert!(run(&["metric", "--model", &m]).status.success());
}

#[test]
fn coarse_contour_grid_exits_3() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "frac.json", 0.45, "[0.8, 0]", "");
    let out = run(&["cepstrum", "--model", &m, "--series", "power", "--truncation", "4", "--grid-size", "16"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn distances() {
    let dir = TempDir::new().unwrap();
    let a = model(dir.path(), "a.json", 0.0, "[0.5, 0]", "");
    let b = model(dir.path(), "b.json", 0.0, "[0.25, 0]", "");
    let v = json_stdout(&run(&["distance", "--model", &a, "--model", &a]));
    assert_eq!(v["distance"].as_f64().unwrap(), 0.0);
    let v = json_stdout(&run(&["distance", "--model", &a, "--model", &b]));
    // sqrt(Li2(1/16) - 2 Li2(1/8) + Li2(1/4))
    assert!((v["distance"].as_f64().unwrap() - 0.269_958_518_398_223_73).abs() < 1e-12);
    let contributions = v["contributions"].as_array().unwrap();
    assert!((contributions[1].as_f64().unwrap() - 0.0625).abs() < 1e-16);
    let total: f64 = contributions.iter().map(|c| c.as_f64().unwrap()).sum();
    assert!((total.sqrt() - v["distance"].as_f64().unwrap()).abs() < 1e-15);

    let out = run(&["distance", "--model", &a]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn distance_matrix_is_symmetric_with_zero_diagonal() {
    let dir = TempDir::new().unwrap();
    model(dir.path(), "m1.json", 0.0, "[0.5, 0]", "");
    model(dir.path(), "m2.json", 0.3, "[0.2, 0.4]", "[-0.5, 0]");
    model(dir.path(), "m3.json", -0.2, "", "[0.7, -0.1]");
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let out = run(&["distance-matrix", "--dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["model", "m1", "m2", "m3"]);
    let m: Vec<Vec<f64>> = rows[1..].iter().map(|r| r[1..].iter().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(m.len(), 3);
    for i in 0..3 {
        assert_eq!(m[i][i], 0.0);
        for j in 0..3 {
            assert_eq!(m[i][j], m[j][i]);
            assert!(i == j || m[i][j] > 0.0);
        }
    }
    let out = run(&["distance-matrix", "--dir", dir.path().to_str().unwrap(), "--output", "json"]);
    let v = json_stdout(&out);
    assert_eq!(v["matrix"][0][1].as_f64().unwrap(), m[0][1]);
}

#[test]
fn distance_matrix_of_empty_dir_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = run(&["distance-matrix", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kernel_values() {
    let v = json_stdout(&run(&["kernel", "--u", "0.5", "--v", "0.5", "--weight", r#"{"family": "bergman"}"#]));
    assert!((re(&v["value"]) - 16.0 / 9.0).abs() < 1e-15);
    let v = json_stdout(&run(&["kernel", "--u", "0.5,0", "--v", "0.5,0"]));
    assert!((re(&v["value"]) - 4.0 / 3.0).abs() < 1e-15);
    let v = json_stdout(&run(&["kernel", "--u", "0.3,-0.2", "--v", "0,0", "--order-m", "0"]));
    assert_eq!(re(&v["value"]), 1.0);
    assert_eq!(run(&["kernel", "--u", "2", "--v", "0"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = run(&["verify", "--seed", "11", "--models", "4"]);
    let b = run(&["verify", "--seed", "11", "--models", "4"]);
    let v = json_stdout(&a);
    assert_eq!(v["passed"], true);
    assert_eq!(a.stdout, b.stdout);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    for name in ["series_vs_closed", "closed_vs_fd", "kahler_conditions", "connection_fd", "metric_axioms"] {
        assert!(names.contains(&name));
    }
}

#[test]
fn verify_catches_injected_sign_error() {
    let out = run(&["verify", "--models", "2", "--inject-sign-error"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("closed_vs_fd"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn out_flag_and_thread_cap() {
    let dir = TempDir::new().unwrap();
    let m = model(dir.path(), "ar.json", 0.0, "[0.5, 0]", "");
    let target = dir.path().join("report.json");
    let out = bin()
        .env("KAHLER_HARDY_THREADS", "1")
        .args(["metric", "--model", &m, "--out", target.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert!((re(&v["metric"][0][0]) - 4.0 / 3.0).abs() < 1e-12);

    let out = bin()
        .env("KAHLER_HARDY_THREADS", "zero")
        .args(["metric", "--model", &m])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn model_json_round_trips_bit_exactly() {
    use kahler_hardy::filter_models::ArfimaModel;
    let text = r#"{"sigma": 2.5066282746310002, "d": -0.12345678901234566, "poles": [[0.1, 0.30000000000000004]], "zeros": [[-0.7071067811865476, 1e-17]]}"#;
    let first = ArfimaModel::from_json(&serde_json::from_str(text).unwrap()).unwrap();
    let serialized = serde_json::to_string(&first.to_json()).unwrap();
    let second = ArfimaModel::from_json(&serde_json::from_str(&serialized).unwrap()).unwrap();
    assert_eq!(first, second);
    assert!(serialized.contains("0.30000000000000004") && serialized.contains("-0.12345678901234566"));
}
