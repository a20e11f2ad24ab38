//! Computes a cover in rationals with uninterpreted functions and checks it
//! against bounded consequences at the default depth and one above it.

use std::collections::BTreeSet;

use symelim::cover::{self, CoverOptions};
use symelim::syntax::parse_problem;

fn main() {
    let p = parse_problem(include_str!("../problems/plain_cover.smt")).expect("problem parses");
    let keep: BTreeSet<_> = p.shared_constants();
    let vc = cover::verified_cover(&p.goal, &keep, &CoverOptions::default()).expect("cover computed");
    println!("phi: {}", p.goal);
    println!("cover: {}", vc.psi);
    for r in &vc.reports {
        println!(
            "  depth {}: entailed {} complete {} signature {}",
            r.depth, r.entailment_ok, r.completeness_ok, r.signature_ok
        );
    }
}
