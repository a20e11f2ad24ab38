//! Exit codes and report text of the command-line front end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symelim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_ui_prints_psi() {
    let p = problem("disjoint_free_function.smt");
    let o = run(&["gen-ui", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(fragment disjoint)"), "{out}");
    assert!(out.contains("(psi (<= e a))"), "{out}");
    assert!(out.contains("(psi-entailed true)"), "{out}");
}

#[test]
fn check_sat_reports_instances() {
    let p = problem("chain_unsat.smt");
    let o = run(&["check-sat", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(result unsat)"), "{out}");
    assert!(out.contains("(terms ((f c) (g c)))"), "{out}");
}

#[test]
fn define_prints_definition_and_claims() {
    let p = problem("define_linear.smt");
    let o = run(&["define", p.to_str().unwrap(), "g"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(define g ((x1 rat)) (y rat) (= (* 3 x1) y))"), "{out}");
    assert!(out.contains("(claim1 true)") && out.contains("(claim2 true)"), "{out}");
}

#[test]
fn unsupported_fragment_exits_with_one() {
    let p = problem("monotone_unbounded.smt");
    let o = run(&["gen-ui", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("(fragment unsupported)"));
}

#[test]
fn trace_goes_to_stderr() {
    let p = problem("two_sorted_bounds.smt");
    let o = run(&["--trace", "gen-ui", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
    assert!(stdout(&o).starts_with("(report"));
}

#[test]
fn bad_input_exits_with_three() {
    let o = run(&["check-sat", "/nonexistent/problem.smt"]);
    assert_eq!(o.status.code(), Some(3));
    let dir = std::env::temp_dir().join(format!("symelim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.smt");
    std::fs::write(&bad, "(problem (goal").unwrap();
    let o = run(&["check-sat", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unclosed"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_symbol_for_define_is_rejected() {
    let p = problem("define_linear.smt");
    let o = run(&["define", p.to_str().unwrap(), "nosuch"]);
    assert_eq!(o.status.code(), Some(3));
}
