//! End-to-end runs of the `wsuper` binary and its library entry point.

use std::process::Command;
use wsuper_cli::cli::main_with_args;
use wsuper_cli::report::{from_structured, to_structured, Status};

fn run(args: &[&str]) -> (String, i32) {
    main_with_args(std::iter::once("wsuper").chain(args.iter().copied()))
}

fn binary(args: &[&str], workers: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wsuper"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("WSUPER_WORKERS", w),
        None => cmd.env_remove("WSUPER_WORKERS"),
    };
    cmd.output().expect("binary runs")
}

#[test]
fn quadratic_base_case_passes() {
    let (out, code) = run(&["verify", "--M", "1", "--N", "0", "--suite", "quadratic", "--ij", "1,1"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS  quadratic"));
    assert!(out.trim_end().ends_with("overall: PASS"));
}

#[test]
fn diagram_lists_every_system() {
    let (out, code) = run(&["diagram", "--M", "2", "--N", "0", "--all", "--format", "structured"]);
    assert_eq!(code, 0);
    let rep = from_structured(&out).unwrap();
    let rows = &rep.tables[0].rows;
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.last().unwrap() == "2 + r"));
}

#[test]
fn params_prints_one_table_per_point() {
    let (out, code) = run(&["params", "--M", "1", "--N", "0", "--modes", "1", "--format", "structured"]);
    assert_eq!(code, 0);
    let rep = from_structured(&out).unwrap();
    assert_eq!(rep.tables.len(), 3);
    assert!(rep.tables[0].columns.iter().any(|c| c == "lambda(1)"));
    assert_eq!(rep.status, Status::Pass);
}

#[test]
fn structured_output_round_trips_and_is_deterministic() {
    let args = ["verify", "--M", "1", "--N", "0", "--suite", "diagram,exchange", "--cap", "3", "--format", "structured"];
    let (a, code) = run(&args);
    assert_eq!(code, 0);
    let (b, _) = run(&args);
    assert_eq!(a, b);
    let rep = from_structured(&a).unwrap();
    assert_eq!(to_structured(&rep), a);
    assert_eq!(rep.suites.iter().map(|s| s.suite.as_str()).collect::<Vec<_>>(), ["diagram", "exchange"]);
}

#[test]
fn poisson_skips_when_m_is_below_n() {
    let (out, code) = run(&["verify", "--M", "0", "--N", "1", "--suite", "poisson"]);
    assert_eq!(code, 0);
    assert!(out.contains("SKIP  poisson"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "--M", "0", "--N", "0"]).1, 2);
    assert_eq!(run(&["verify", "--points", "2/3:3"]).1, 2);
    assert_eq!(run(&["verify", "--rule", "nope"]).1, 2);
    assert_eq!(run(&["frobnicate"]).1, 2);
    assert_eq!(run(&["diagram", "--all", "--index", "1"]).1, 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let path = std::env::temp_dir().join(format!("wsuper-cli-test-{}.toml", std::process::id()));
    std::fs::write(&path, "M = 2\nN = 0\ndiagrams = \"all\"\nformat = \"structured\"\n").unwrap();
    let p = path.to_str().unwrap();
    let (out, code) = run(&["--config", p, "diagram", "--N", "1"]);
    assert_eq!(code, 0, "{out}");
    let rep = from_structured(&out).unwrap();
    assert_eq!((rep.config.m, rep.config.n), (2, 1));
    assert!(rep.tables[0].rows.len() > 1);

    std::fs::write(&path, "colour = \"red\"\n").unwrap();
    assert_eq!(run(&["--config", p, "diagram"]).1, 2);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn worker_count_does_not_change_the_report() {
    let args = ["verify", "--M", "1", "--N", "1", "--all", "--suite", "quadratic", "--ij", "1,1", "--format", "structured"];
    let seq = binary(&args, Some("1"));
    let par = binary(&args, None);
    assert!(seq.status.success() && par.status.success());
    assert_eq!(seq.stdout, par.stdout);

    let bad = binary(&args, Some("zero"));
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}

#[test]
fn random_points_follow_the_seed() {
    let args = ["--seed", "7", "diagram", "--M", "1", "--N", "0", "--random-points", "2", "--format", "structured"];
    let (a, code) = run(&args);
    assert_eq!(code, 0);
    let rep = from_structured(&a).unwrap();
    assert_eq!(rep.config.points.len(), 5);
    assert_eq!(run(&args).0, a);
}

#[test]
fn currents_runs_no_suites() {
    let (out, code) = run(&["currents", "--M", "1", "--N", "0", "--degree", "2", "--format", "structured"]);
    assert_eq!(code, 0);
    let rep = from_structured(&out).unwrap();
    assert!(rep.suites.is_empty());
    assert!(!rep.tables.is_empty());
}
