//! Checks which symbols of a chain of extensions are implicitly definable
//! and extracts explicit definitions for them.

use symelim::definability::{self, DefinabilityTask};
use symelim::syntax::parse_problem;

fn main() {
    let p = parse_problem(include_str!("../problems/define_piecewise.smt")).expect("problem parses");
    let task = DefinabilityTask::from_problem(&p);
    let free: Vec<String> = task.free.iter().map(|f| f.to_string()).collect();
    println!("free symbols: {}", free.join(" "));
    for f in task.defined.clone() {
        match definability::check_implicit_definable(&task, &f) {
            Ok(true) => {
                let def = definability::extract_definition(&task, &f).expect("definition extracted");
                println!("{def}");
            }
            Ok(false) => println!("{f}: not definable"),
            Err(e) => println!("{f}: {e}"),
        }
    }
}
