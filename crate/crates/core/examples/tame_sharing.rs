//! A two-sorted instance where the kept symbols `g` and `h` are themselves
//! constrained by an axiom. The trace shows the instance set used to
//! ground that axiom before elimination.

use symelim::pipeline::{self, PipelineOptions};
use symelim::syntax::parse_problem;

fn main() {
    let p = parse_problem(include_str!("../problems/two_sorted_bounds.smt")).expect("problem parses");
    let opts = PipelineOptions { trace: true, ..PipelineOptions::default() };
    let report = pipeline::general_uniform_interpolant(&p, &opts).expect("pipeline runs");
    for line in &report.trace {
        println!("  {line}");
    }
    println!("fragment: {}", report.fragment);
    println!("psi: {}", report.psi.expect("verified interpolant"));
}
