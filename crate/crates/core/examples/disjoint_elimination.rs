//! Eliminates a free function and a constant, keeping `g`, `a` and `e`.
//! Prints the intermediate formula, the interpolant and its verification.

use symelim::pipeline::{self, PipelineOptions, Report};
use symelim::syntax::parse_problem;

fn main() {
    let p = parse_problem(include_str!("../problems/disjoint_free_function.smt")).expect("problem parses");
    println!("fragment: {}", pipeline::detect_fragment(&p));
    let report = pipeline::general_uniform_interpolant(&p, &PipelineOptions::default()).expect("pipeline runs");
    println!("gamma: {}", report.gamma.as_ref().unwrap());
    println!("psi:   {}", report.psi.as_ref().unwrap());
    println!("{}", Report::Interpolant { task: "gen-ui", report }.to_sexpr());
}
