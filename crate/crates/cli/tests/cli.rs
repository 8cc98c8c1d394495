//! Black-box tests of the installed binary: exact output bytes, exit
//! codes, and the one-line stderr contract.

use std::path::PathBuf;
use std::process::{Command, Output};

const PARITY3: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/parity3.wbf");
const GOLDEN_SWEEP: &str = include_str!("../../core/tests/data/golden_sweep.csv");
const GOLDEN_SVG: &str = include_str!("data/golden.svg");

fn lowdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = lowdeg(args);
    assert!(out.status.success(), "{args:?}: {out:?}");
    String::from_utf8(out.stdout).unwrap()
}

/// Exit code 2 and a single nonempty diagnostic line on stderr.
fn assert_rejected(args: &[&str]) -> String {
    let out = lowdeg(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}: {out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    let trimmed = stderr.trim_end();
    assert!(!trimmed.is_empty(), "{args:?}: silent failure");
    assert!(!trimmed.contains('\n'), "{args:?}: multi-line stderr {stderr:?}");
    stderr
}

fn temp_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("lowdeg-cli-{}-{tag}", std::process::id()))
}

#[test]
fn certify_parity_emits_the_exact_verdict() {
    let text = stdout_of(&["certify", "--input", PARITY3, "--d", "2"]);
    assert_eq!(text, "NOT UNIQUE-CERTIFIED, max residual 8/8\n");
}

#[test]
fn certify_formats_agree() {
    let csv = stdout_of(&["certify", "--input", PARITY3, "--d", "2", "--format", "csv"]);
    assert_eq!(
        csv,
        "p,d,holds,max_residual,denominator,eta_hat,sign_agrees,argmax_point\n\
         3,2,false,8,8,1,false,0\n"
    );
    let json = stdout_of(&["certify", "--input", PARITY3, "--d", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["holds"], serde_json::json!(false));
    assert_eq!(v["max_residual"], serde_json::json!(8));
    assert_eq!(v["denominator"], serde_json::json!(8));
    assert_eq!(v["eta_hat"], serde_json::json!(1.0));
}

#[test]
fn spectrum_round_trips_through_its_own_output() {
    let text = stdout_of(&["spectrum", "--input", PARITY3]);
    let parsed = lowdeg::transform::Spectrum::from_csv(&text).unwrap();
    let f = lowdeg::BooleanFunction::parse_wbf1(
        &std::fs::read_to_string(PARITY3).unwrap(),
    )
    .unwrap();
    assert_eq!(parsed, lowdeg::spectrum(&f));
    assert_eq!(parsed.coeff(7), 8);
}

#[test]
fn bounds_text_carries_the_reference_cell() {
    let text = stdout_of(&["bounds", "--p", "16", "--d", "12", "--eta", "1.0"]);
    assert!(text.contains("log_uniq_fail_bound=-35.229410412546926"), "{text}");
    assert!(text.contains("K_d=64839"), "{text}");
}

#[test]
fn thresholds_solves_the_reference_window() {
    let text = stdout_of(&["thresholds", "--p", "100", "--eta", "0.5"]);
    let upper: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("d_upper="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((upper - 69.72).abs() <= 1e-2, "{upper}");
}

#[test]
fn sweep_reproduces_the_frozen_reference_run() {
    let text = stdout_of(&[
        "sweep", "--p", "4", "--d", "0,2,4", "--samples", "100", "--seed", "11", "--run-lp",
    ]);
    assert_eq!(text, GOLDEN_SWEEP);
}

#[test]
fn sweep_json_mirrors_the_csv_cells() {
    let json = stdout_of(&[
        "sweep", "--p", "4", "--d", "0,2,4", "--samples", "100", "--seed", "11", "--run-lp",
        "--format", "json",
    ]);
    let cells: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(cells.len(), 3);
    assert_eq!(cells[0]["success_rate"], serde_json::json!(0.0));
    assert_eq!(cells[1]["lp_zero_rate"], serde_json::json!(0.87));
    // Analyses that were not run are null, not zero.
    assert_eq!(cells[0]["collision_rate"], serde_json::Value::Null);
    // Non-finite log bounds travel as the same literal the CSV uses.
    assert_eq!(cells[2]["log_uniq_fail_bound"], serde_json::json!("-inf"));
    assert_eq!(cells[2]["K_d"], serde_json::json!("16"));
}

#[test]
fn collide_exact_reports_the_full_parity_flip() {
    let text = stdout_of(&["collide-exact", "--input", PARITY3, "--d", "2"]);
    assert_eq!(text, "COLLISION, size 8, flips 0 1 2 3 4 5 6 7\n");
    let none = stdout_of(&["collide-exact", "--input", PARITY3, "--d", "3"]);
    assert_eq!(none, "NO-COLLISION, exhaustive\n");
}

#[test]
fn census_runs_are_reproducible() {
    let args = ["collide-census", "--p", "8", "--d", "0", "--samples", "2000", "--seed", "1"];
    let a = stdout_of(&args);
    let b = stdout_of(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("p=8\n"), "{a}");
    let json = stdout_of(&[
        "collide-census", "--p", "8", "--d", "0", "--samples", "2000", "--seed", "1",
        "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert!(v["pairs"].as_array().is_some());
    assert_eq!(v["samples"], serde_json::json!(2000));
}

#[test]
fn lp_subcommands_emit_exact_rationals() {
    let csv = stdout_of(&["competitor-lp", "--input", PARITY3, "--d", "1", "--format", "csv"]);
    assert_eq!(csv, "p,d,optimum\n3,1,16/1\n");
    let feasible = stdout_of(&["sign-cert", "--input", PARITY3, "--d", "3", "--format", "csv"]);
    assert_eq!(feasible, "p,d,feasible,margin\n3,3,true,1/1\n");
    let infeasible = stdout_of(&["sign-cert", "--input", PARITY3, "--d", "2", "--format", "csv"]);
    assert_eq!(infeasible, "p,d,feasible,margin\n3,2,false,\n");
}

#[test]
fn plot_reproduces_the_frozen_svg() {
    let csv = temp_path("golden.csv");
    let svg = temp_path("golden.svg");
    std::fs::write(&csv, GOLDEN_SWEEP).unwrap();
    let out = lowdeg(&[
        "plot",
        "--input",
        csv.to_str().unwrap(),
        "--output",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let rendered = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(rendered, GOLDEN_SVG);
    assert!(rendered.starts_with("<?xml version=\"1.0\""));
    assert!(rendered.contains("viewBox=\"0 0 800 500\""));
    assert_eq!(rendered.matches("<polyline").count(), 1);
    assert_eq!(rendered.matches("<circle").count(), 3);
    assert!(rendered.contains(">p/2</text>"));
    std::fs::remove_file(&csv).unwrap();
    std::fs::remove_file(&svg).unwrap();
}

#[test]
fn plot_rejects_an_empty_table() {
    let csv = temp_path("empty.csv");
    let header = GOLDEN_SWEEP.lines().next().unwrap();
    std::fs::write(&csv, format!("{header}\n")).unwrap();
    let stderr = assert_rejected(&["plot", "--input", csv.to_str().unwrap()]);
    assert!(stderr.contains("nothing to plot"), "{stderr}");
    std::fs::remove_file(&csv).unwrap();
}

#[test]
fn randomized_subcommands_demand_a_seed() {
    let stderr = assert_rejected(&["sweep", "--p", "4", "--samples", "5"]);
    assert!(stderr.contains("--seed"), "{stderr}");
    assert_rejected(&["collide-census", "--p", "4", "--d", "1", "--samples", "10"]);
    assert_rejected(&["collide-anneal", "--input", PARITY3, "--d", "1"]);
}

#[test]
fn stray_flags_are_rejected_per_subcommand() {
    assert_rejected(&["certify", "--input", PARITY3, "--d", "2", "--bogus"]);
    // --seed exists elsewhere but thresholds does not consume it.
    assert_rejected(&["thresholds", "--p", "100", "--eta", "0.5", "--seed", "7"]);
    assert_rejected(&["spectrum", "--input", PARITY3, "--samples", "3"]);
}

#[test]
fn broken_inputs_fail_with_one_line() {
    assert_rejected(&["spectrum", "--input", "/nonexistent.wbf"]);
    let bad = temp_path("bad.wbf");
    std::fs::write(&bad, "WBF1\n2\n++--x\n").unwrap();
    let stderr = assert_rejected(&["certify", "--input", bad.to_str().unwrap(), "--d", "1"]);
    assert!(stderr.contains("5 characters, expected 4"), "{stderr}");
    std::fs::remove_file(&bad).unwrap();
    // Degree beyond the dimension is a domain error, same discipline.
    assert_rejected(&["certify", "--input", PARITY3, "--d", "4"]);
}

#[test]
fn output_flag_and_stdout_carry_identical_bytes() {
    let streamed = stdout_of(&["certify", "--input", PARITY3, "--d", "2"]);
    let path = temp_path("verdict.txt");
    let out = lowdeg(&[
        "certify", "--input", PARITY3, "--d", "2", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), streamed);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn help_and_version_exit_cleanly() {
    for args in [&["--help"][..], &["--version"][..], &["sweep", "--help"][..]] {
        let out = lowdeg(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(!out.stdout.is_empty());
    }
}
