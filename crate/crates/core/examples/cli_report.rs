//! Runs every bundled problem through its own task and prints the report
//! and exit code the command-line tool would produce.

use symelim::pipeline::{self, PipelineOptions};
use symelim::syntax::parse_problem;

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/problems");
    let mut files: Vec<_> =
        std::fs::read_dir(dir).expect("problems dir").filter_map(|e| e.ok()).map(|e| e.path()).collect();
    files.sort();
    for f in files {
        let p = parse_problem(&std::fs::read_to_string(&f).expect("readable")).expect("problem parses");
        let report = pipeline::run(&p, &PipelineOptions::default()).expect("pipeline runs");
        println!(";; {} (exit {})", f.file_name().unwrap().to_string_lossy(), report.exit_code());
        println!("{}", report.to_sexpr());
    }
}
