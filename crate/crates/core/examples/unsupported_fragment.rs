//! Problems outside the supported fragments are reported with a reason
//! instead of an unverified answer.

use symelim::pipeline::{self, FragmentTag};
use symelim::syntax::parse_problem;

fn main() {
    for (name, src) in [
        ("monotone_unbounded", include_str!("../problems/monotone_unbounded.smt")),
        ("monotone_sharing", include_str!("../problems/monotone_sharing.smt")),
    ] {
        let p = parse_problem(src).expect("problem parses");
        match pipeline::detect_fragment(&p) {
            FragmentTag::Unsupported(reason) => println!("{name}: unsupported\n  {reason}"),
            tag => println!("{name}: {tag}"),
        }
    }
}
