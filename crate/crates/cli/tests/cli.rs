use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn novikov(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_novikov"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn fibonacci_transfer() {
    let out = novikov(&["transfer", "--input", &data("fibonacci.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["P"], serde_json::json!(["1"]));
    assert_eq!(v["Q"], serde_json::json!(["1", "-1", "-1"]));
    assert_eq!(v["m"], 0);
    assert_eq!(v["oracle_match"], true);
    assert_eq!(v["series"]["coeffs"][19], "6765");
}

#[test]
fn quickness_constant() {
    let out = novikov(&["flow", "quickness", "--N", "3", "--beta", "1"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["quickness"], 25.0);
    assert_eq!(v["constant_ok"], true);
    let c = v["annulus_constant"].as_f64().unwrap();
    assert!((c - (4.0 + 15f64.sqrt()).ln()).abs() < 1e-15 && c <= 8.0);
}

#[test]
fn fit_on_non_rational_prefix_is_null() {
    let factorials = r#"{"lead":0,"coeffs":["1","1","2","6","24","120","720","5040","40320","362880"],"truncation":10}"#;
    let out = novikov(&["series", "fit", "--input", "-"], Some(factorials));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["fit"], Value::Null);
}

#[test]
fn expand_then_fit_through_the_cli() {
    let r = r#"{"P":["2","-1"],"m":1,"Q":["1","-3","1"]}"#;
    let out = novikov(&["series", "expand", "--input", "-", "--terms", "12"], Some(r));
    assert_eq!(out.status.code(), Some(0));
    let series = json(&out)["series"].to_string();
    let out = novikov(&["series", "fit", "--input", "-"], Some(&series));
    let fit = &json(&out)["fit"];
    assert_eq!(fit, &serde_json::from_str::<Value>(r).unwrap());
}

#[test]
fn malformed_input_exits_2() {
    let out = novikov(&["series", "expand", "--input", "-"], Some("{\"P\": [\"1\"]"));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["ok"], false);
    // Q(0) must be 1
    let out = novikov(&["series", "expand", "--input", "-"], Some(r#"{"P":["1"],"m":0,"Q":["2","1"]}"#));
    assert_eq!(out.status.code(), Some(2));
    let out = novikov(&["flow", "annulus", "--outer", "1", "--inner", "2"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = novikov(&["flow", "lens", "--format", "csv", "--samples", "2", "--radius", "-1"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn violated_bound_exits_1() {
    let out = novikov(&["stability", "gronwall", "--declared-d", "0.5"], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["violated"], true);
    assert!(v["separation"].as_f64().unwrap() > v["bound"].as_f64().unwrap());

    let out = novikov(&["stability", "reach", "--bump", "0.5"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(!json(&out)["report"]["w_failures"].as_array().unwrap().is_empty());
}

#[test]
fn stability_checks_pass_on_defaults() {
    for args in [
        &["stability", "gronwall"][..],
        &["stability", "gronwall", "--random", "5", "--seed", "2"],
        &["stability", "crossing"],
        &["stability", "reach"],
    ] {
        let out = novikov(args, None);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
    let v = json(&novikov(&["stability", "crossing"], None));
    assert!((v["tau0"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-10);
}

#[test]
fn sweeps_emit_csv_and_are_seeded() {
    let run = |seed: &str| novikov(&["flow", "annulus", "--samples", "50", "--seed", seed, "--format", "csv"], None);
    let (a, b, c) = (run("4"), run("4"), run("5"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("id,start,index,time,bound,slack\n"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn torus_report_is_deterministic() {
    let a = novikov(&["torus"], None);
    let b = novikov(&["torus"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["d_squared_ok"], true);
    assert_eq!(v["critical_points"].as_array().unwrap().len(), 8);
    assert_eq!(v["counts"].as_array().unwrap().len(), 16);
    assert!(v["fitted"].as_array().unwrap().iter().all(|f| f["prediction_ok"] == true));
    assert!(v["growth"].as_array().unwrap().iter().all(|g| g["ok"] == true));
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("novikov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q.json");
    let out = novikov(&["flow", "quickness", "--N", "2", "-o", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let stdout = novikov(&["flow", "quickness", "--N", "2"], None).stdout;
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
