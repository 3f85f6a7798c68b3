use std::process::{Command, Output};

use cstar_approx::io::DistReport;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstar-approx")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn badnear_distance_is_certified() {
    let o = run(&["dist", &fixture("badnear.json"), "Z", "--certify", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = DistReport::parse(&stdout(&o)).unwrap();
    assert!((report.radius - 5.0).abs() <= 1e-6);
    let cert = report.certificate.expect("certificate present");
    assert!(cert.weights.len() <= 5);
    assert!(cert.to_witness().is_ok());
}

#[test]
fn json_output_is_deterministic_and_round_trips() {
    let args = ["dist", &fixture("non_unique.json"), "A", "--json"];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let report = DistReport::parse(&a).unwrap();
    assert!((report.radius - 1.0).abs() <= 1e-6);
    assert_eq!(DistReport::parse(&report.to_json()).unwrap(), report);
}

#[test]
fn element_of_subalgebra_has_radius_zero() {
    let o = run(&["dist", &fixture("badnear.json"), "B", "--json", "--certify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(DistReport::parse(&stdout(&o)).unwrap().radius <= 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dist", &fixture("missing.json"), "A"]).status.code(), Some(2));
    assert_eq!(run(&["dist", &fixture("badnear.json"), "nope"]).status.code(), Some(2));
    assert_eq!(run(&["dist", &fixture("badnear.json"), "A", "--tol", "1e-15"]).status.code(), Some(3));
    // A is not minimal (its distance 5 is below its norm 7), so no witness exists.
    assert_eq!(run(&["witness", &fixture("badnear.json"), "A"]).status.code(), Some(4));
}

#[test]
fn witness_and_gns() {
    let o = run(&["witness", &fixture("badnear.json"), "Z", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["uniqueness"], "unique");

    let o = run(&["gns", &fixture("badnear.json"), "A", "--json", "--emit-unitary"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["commutator_seminorm"].as_f64().unwrap() - 5.0).abs() <= 1e-5);
    let dim = v["dimension"].as_u64().unwrap() as usize;
    assert_eq!(v["unitary"].as_array().unwrap().len(), dim);
}

#[test]
fn norm_and_check() {
    let o = run(&["norm", &fixture("badnear.json"), "A"]);
    assert_eq!(stdout(&o).trim().parse::<f64>().unwrap(), 7.0);
    let o = run(&["check", &fixture("exercise.json"), "--property", "leibniz", "--trials", "10", "--seed", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["trials"], 10);
}

#[test]
fn examples_pass() {
    let o = run(&["examples"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(": PASS").count(), 3);
}
