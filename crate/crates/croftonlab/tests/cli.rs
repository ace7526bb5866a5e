use std::process::Command;

use clap::Parser;
use croftonlab::cli::{Cli, Command as Sub};
use croftonlab::commands::{cmd_check, cmd_volumes};
use croftonlab::exec::Parallel;
use croftonlab::output::{render, Format};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_croftonlab"));
    c.env("CROFTONLAB_THREADS", "2");
    c
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn gb_table_for_n2() {
    let (code, v) = run_json(&["coeffs", "--gb", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["result"]["kind"], "gauss-bonnet");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn identities_pass() {
    let (code, v) = run_json(&["coeffs", "--identities", "--max-n", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
}

#[test]
fn gauss_bonnet_check_exit_code() {
    let (code, v) = run_json(&["check", "gauss-bonnet", "--eps", "-1", "--n", "3", "--R", "0.7"]);
    assert_eq!(code, 0);
    assert!(v["result"]["relativeResidual"].as_f64().unwrap().abs() < 1e-8);
    assert_eq!(v["tolerance"], 1e-8);
}

#[test]
fn failing_gate_exits_one() {
    // a tolerance no floating-point residual can meet
    let (code, v) = run_json(&["check", "variation", "--shape", "ball", "--eps", "1", "--R", "0.5", "--tol", "1e-300"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
}

#[test]
fn bad_input_exits_two() {
    let out = bin().args(["volumes", "--shape", "ellipsoid", "--axes", "1,2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--axes"));
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vol.csv");
    let out = bin()
        .args(["volumes", "--n", "2", "--R", "1", "--closed-form", "--format", "csv", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("table/B:1.0") && header.contains("table/mu:2.1"), "{header}");
}

fn parse(args: &[&str]) -> Sub {
    Cli::try_parse_from(args).unwrap().command
}

#[test]
fn output_independent_of_thread_count() {
    let Sub::Check(check) = parse(&["croftonlab", "check", "crofton-mc", "--n", "2", "--r", "1", "--shape", "ellipsoid",
        "--axes", "1,0.8,0.6,0.9", "--samples", "20000", "--seed", "9", "--level", "1"]) else { panic!() };
    let Sub::Volumes(vol) = parse(&["croftonlab", "volumes", "--n", "2", "--shape", "ellipsoid", "--axes", "1,0.8,0.6,0.9", "--level", "1"]) else { panic!() };
    let mut outputs = Vec::new();
    for threads in [1, 3] {
        let par = Parallel::new(threads).unwrap();
        let a = render(&cmd_check(&par, &check).unwrap().value, Format::Json).unwrap();
        let b = render(&cmd_volumes(&par, &vol).unwrap().value, Format::Json).unwrap();
        outputs.push((a, b));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn report_embeds_config() {
    let (_, v) = run_json(&["check", "grassmann-pointwise", "--n", "3", "--r", "1", "--samples", "2000", "--seed", "4"]);
    assert_eq!(v["config"]["samples"], 2000);
    assert_eq!(v["seed"], 4);
    assert_eq!(v["config"]["command"], "check grassmann-pointwise");
}
