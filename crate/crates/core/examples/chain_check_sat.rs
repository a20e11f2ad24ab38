//! Hierarchical satisfiability in a chain of local extensions: the closure
//! adds the lower-layer term `g(c)` that refutation needs.

use symelim::locality::{self, ClosureOperator};
use symelim::syntax::parse_problem;

fn main() {
    let p = parse_problem(include_str!("../problems/chain_unsat.smt")).expect("problem parses");
    let closure = ClosureOperator::for_shape(&p.ext);
    let out = locality::hierarchical_check_sat(&p.ext.axioms, &p.goal, &closure).expect("check runs");
    let terms: Vec<String> = out.terms.iter().map(|t| t.to_string()).collect();
    println!("closure {}: {}", closure.kind(), terms.join(" "));
    for i in &out.instances {
        println!("  instance {i}");
    }
    println!("{}", if out.result.is_unsat() { "unsat" } else { "sat" });

    // With only the ground terms of the goal, the refutation is lost.
    let flat =
        locality::hierarchical_check_sat(&p.ext.axioms, &p.goal, &ClosureOperator::Identity).expect("check runs");
    println!("identity closure: {}", if flat.result.is_unsat() { "unsat" } else { "sat" });
}
