use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], input: &str) -> (Output, Value) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_heightbound"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let doc = serde_json::from_slice(&out.stdout).expect("report is JSON");
    (out, doc)
}

const POLY: &str = r#"{"schema":1,"curve":{"A":0,"B":-2},"cm":{"D":-3,"f":1},"p":"x"}"#;

#[test]
fn selftest_exits_zero() {
    let (out, doc) = run(&["selftest"], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc["certification"]["passed"], Value::Bool(true));
}

#[test]
fn polybound_report_sections() {
    let (out, doc) = run(&["polybound"], POLY);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["bound"]["unit"], "nats");
    assert_eq!(doc["bound"]["branch"], "poly-family");
    assert!(doc["bound"]["value"].as_f64().unwrap() > 1e15);
    let warnings: Vec<&str> = doc["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_str().unwrap())
        .collect();
    assert!(warnings.iter().any(|w| w.contains("Bézout")));
    assert!(warnings.iter().any(|w| w.contains("2e14")));
    let trace = doc["constants_trace"].as_array().unwrap();
    let c0 = trace.iter().find(|c| c["name"] == "C0").unwrap();
    assert_eq!(c0["provenance"], "rigorous");
    assert_eq!(c0["unit"], "nats");
    assert!(trace
        .iter()
        .any(|c| c["name"] == "C0_packaged" && c["provenance"] == "packaged"));
    assert_eq!(doc["input_echo"]["p"], "x");
}

#[test]
fn reports_are_byte_stable() {
    let (a, _) = run(&["polybound"], POLY);
    let (b, _) = run(&["polybound"], POLY);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bound_out_of_range_exits_one() {
    let doc = r#"{"schema":1,"curve":{"A":0,"B":1},"N":3,"degC":10,"h2C":5,"tC":2,"rC":3,"r":2}"#;
    let (out, rep) = run(&["bound"], doc);
    assert_eq!(out.status.code(), Some(1));
    assert!(rep["error"]["message"]
        .as_str()
        .unwrap()
        .contains("max(r_C − t_C, t_C)"));
}

#[test]
fn bound_transverse_and_general() {
    let t = r#"{"schema":1,"curve":{"A":0,"B":1},"cm":{"D":-3},"N":2,"degC":15,"h2C":"100","r":1}"#;
    let (out, rep) = run(&["bound"], t);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rep["bound"]["branch"], "transverse");
    let g = r#"{"schema":1,"curve":{"A":0,"B":1},"N":4,"degC":15,"h2C":"100","tC":1,"rC":3,"r":1}"#;
    let (out, rep) = run(&["bound"], g);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rep["bound"]["branch"], "empty-certificate");
}

#[test]
fn incomplete_search_exits_two() {
    let doc = r#"{"schema":1,"curve":{"A":0,"B":-2},"cm":{"D":-3,"f":1},"p":"x","generator":["3","5"],"rank":1}"#;
    let (out, rep) = run(&["search", "--radius-cap", "50"], doc);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(rep["certification"]["fully_certified"], false);
    assert_eq!(rep["certification"]["searched_radius"], 50);
}

#[test]
fn torsion_search_exits_zero() {
    let doc = r#"{"schema":1,"curve":{"A":0,"B":1},"p":"x - 1","generator":null,"rank":0}"#;
    let (out, rep) = run(&["search"], doc);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rep["certification"]["points_found"].as_array().unwrap().len(), 4);
}

#[test]
fn height_and_lattice() {
    let (out, rep) = run(
        &["height", "--eps", "1e-6"],
        r#"{"schema":1,"curve":{"A":0,"B":-2},"point":["3","5"]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let h = rep["certification"]["canonical"]["value"].as_f64().unwrap();
    assert!((h - 2.0244).abs() < 1e-3);
    let (out, rep) = run(&["lattice"], r#"{"schema":1,"cm":{"D":-1,"f":1},"rows":[[[1,1],2,0]]}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rep["certification"]["minima"]["minkowski_ok"], true);
    assert_eq!(rep["certification"]["complement"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_input_exits_one() {
    let (out, _) = run(&["polybound"], r#"{"schema":2}"#);
    assert_eq!(out.status.code(), Some(1));
    let (out, _) = run(&["polybound"], "not json");
    assert_eq!(out.status.code(), Some(1));
}
