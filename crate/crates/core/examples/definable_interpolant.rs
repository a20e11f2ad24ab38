//! Uniform interpolation when the kept symbols are definable: `f` and `g`
//! are rewritten by their definitions and the cover is taken over the
//! free `h`.

use symelim::pipeline::{self, PipelineOptions};
use symelim::syntax::parse_problem;

fn main() {
    let p = parse_problem(include_str!("../problems/definable_fixpoint.smt")).expect("problem parses");
    let report = pipeline::general_uniform_interpolant(&p, &PipelineOptions::default()).expect("pipeline runs");
    println!("fragment: {}", report.fragment);
    println!("gamma: {}", report.gamma.as_ref().unwrap());
    for d in &report.definitions {
        println!("{d}");
    }
    println!("psi: {}", report.psi.expect("verified interpolant"));
}
