use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use iwasawa_core::cli::InvariantsReport;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(args)
        .env_remove("IWASAWA_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_spec(contents: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    file.write_all(contents.as_bytes()).unwrap();
    file
}

#[test]
fn invariants_table_for_cp2() {
    let out = run(&["invariants", corpus("cp2_p5.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "spectrum CP2 at p = 5\n\
         module     j  lambda  mu  charpoly\n\
         KU^0       0       1   0  T\n\
         KU^0       1       1   0  T - 5\n\
         KU^0       2       1   0  T - 35\n\
         KU^0       3       0   0  1\n\
         KU^-1      0       0   0  1\n\
         KU^-1      1       0   0  1\n\
         KU^-1      2       0   0  1\n\
         KU^-1      3       0   0  1\n\
         euler characteristic: 3\n\
         total lambda: 3\n"
    );
}

#[test]
fn invariants_json_round_trips() {
    let path = corpus("mixed_p5.json");
    let out = run(&["invariants", path.to_str().unwrap(), "--format", "json", "--precision", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: InvariantsReport = serde_json::from_str(&stdout(&out)).unwrap();
    let spectrum = iwasawa_core::cli::read_spectrum(&path, None).unwrap();
    assert_eq!(parsed, iwasawa_core::cli::invariants_report(&spectrum, 8).unwrap());
}

#[test]
fn empty_spectrum_has_trivial_invariants() {
    let out = run(&["invariants", corpus("empty_p7.json").to_str().unwrap(), "--format", "json"]);
    let report: InvariantsReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.euler_characteristic, 0);
    assert_eq!(report.eigenspaces.len(), 12);
    assert!(report.eigenspaces.iter().all(|e| e.charpoly == "1"));
}

#[test]
fn format_defaults_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(["sphere-table", "--prime", "3", "--from", "-1", "--to", "3"])
        .env("IWASAWA_FORMAT", "csv")
        .output()
        .unwrap();
    assert_eq!(stdout(&out), "t,exponent,group\n-1,inf,Z_p\n0,inf,Z_p\n1,0,0\n2,0,0\n3,1,Z/3^1\n");
}

#[test]
fn imc_exit_zero_on_corpus() {
    for name in ["s0_p3.json", "s1_p3.json", "s2_p3.json", "s4_p5.json", "cp2_p5.json", "cp2_p3.json", "cp3_p7.json", "mixed_p5.json", "empty_p7.json"] {
        let out = run(&["imc", corpus(name).to_str().unwrap(), "--m-range", "-10..10", "--format", "csv"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let text = stdout(&out);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("m,side,lhs_val,rhs_val,in_window,match"));
        assert_eq!(lines.count(), 42, "{name}");
    }
}

#[test]
fn imc_cp2_rows() {
    let out = run(&["imc", corpus("cp2_p5.json").to_str().unwrap(), "--m-range", "-3..-3", "--format", "csv"]);
    assert_eq!(stdout(&out), "m,side,lhs_val,rhs_val,in_window,match\n-3,2m-1,0,0,true,true\n-3,2m,0,0,true,true\n");
}

#[test]
fn imc_output_is_deterministic() {
    let path = corpus("mixed_p5.json");
    let args = ["imc", path.to_str().unwrap(), "--m-range", "-15..15", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn growth_ladder_for_sphere() {
    let out = run(&["growth", corpus("s0_p3.json").to_str().unwrap(), "--ladder", "6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let averages: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(averages, ["-1/2", "-1", "-3/2", "-2", "-5/2", "-3", "-7/2"]);
    let ratio: f64 = text.lines().last().unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((ratio - 1.0).abs() <= 0.2);
}

#[test]
fn growth_lambda_zero() {
    let spec = temp_spec(r#"{"p": 3, "betti": {"0": 1, "1": 1}}"#);
    let out = run(&["growth", spec.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero"));
    let out = run(&["growth", spec.path().to_str().unwrap(), "--average-only"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_json_exits_two_with_position() {
    let spec = temp_spec("{\n  \"p\": 3,\n  \"betti\": {\"0\": 1,}\n}");
    let out = run(&["invariants", spec.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn unknown_keys_exit_two() {
    let spec = temp_spec(r#"{"p": 3, "betti": {}, "cells": 1}"#);
    assert_eq!(run(&["invariants", spec.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn invalid_primes_exit_three() {
    let spec = temp_spec(r#"{"p": 9, "betti": {"0": 1}}"#);
    assert_eq!(run(&["invariants", spec.path().to_str().unwrap()]).status.code(), Some(3));
    let s0 = corpus("s0_p3.json");
    let out = run(&["imc", s0.to_str().unwrap(), "--prime-override", "21"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["imc", s0.to_str().unwrap(), "--prime-override", "11"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(run(&["sphere-table", "--prime", "1"]).status.code(), Some(3));
}

#[test]
fn missing_file_exits_two() {
    assert_eq!(run(&["invariants", "/nonexistent/spectrum.json"]).status.code(), Some(2));
}
