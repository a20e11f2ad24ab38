//! Linear quantifier elimination over the rationals, with uninterpreted
//! terms treated as opaque variables.

use symelim::qe::{self, ExistentialBlock};
use symelim::syntax::{parse_formula, parse_problem};

fn main() {
    let p =
        parse_problem("(problem (functions (f (rat) rat)) (constants (x rat) (y rat) (a rat) (b rat)) (goal true))")
            .expect("signature parses");
    let body = parse_formula("(and (<= a x) (< x y) (<= (* 2 y) (+ b 1)) (or (= x (f a)) (< (f b) y)))", &p.sig)
        .expect("formula parses");
    let x = p.sig.constant("x").unwrap();
    let y = p.sig.constant("y").unwrap();
    println!("exists x y. {body}");
    let out = qe::eliminate_quantifiers(&ExistentialBlock::new(vec![x, y], body)).expect("qe succeeds");
    println!("  = {out}");
}
