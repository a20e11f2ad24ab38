use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use symelim::pipeline::{self, FragmentChoice, PipelineOptions, Report, EXIT_INPUT};
use symelim::syntax::{parse_problem, Problem, Task};

#[derive(Parser)]
#[command(name = "symelim", version, about = "Symbol elimination and uniform interpolation in local theory extensions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pipeline to use instead of detecting one.
    #[arg(long, value_enum, default_value_t = Fragment::Auto, global = true)]
    fragment: Fragment,
    /// Depth of the bounded cover check.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Print intermediate results to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Skip verification of the result.
    #[arg(long, global = true)]
    no_verify: bool,
    /// Output format; only s-expressions are supported.
    #[arg(long, value_enum, default_value_t = Emit::Sexpr, global = true)]
    emit: Emit,
}

#[derive(Subcommand)]
enum Command {
    /// Satisfiability of the goal modulo the axioms.
    CheckSat { file: PathBuf },
    /// Eliminate the non-shared function symbols and constants.
    Eliminate { file: PathBuf },
    /// Cover of the goal over the shared constants.
    Cover { file: PathBuf },
    /// General uniform interpolant over the shared symbols.
    GenUi { file: PathBuf },
    /// Explicit definition of an implicitly definable symbol.
    Define { file: PathBuf, symbol: String },
    /// Compute the interpolant and check the cover at the given depth.
    Verify { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fragment {
    Auto,
    Uif,
    Tame,
    Definable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Sexpr,
}

fn load(path: &PathBuf) -> Result<Problem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_problem(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = PipelineOptions {
        fragment: match cli.fragment {
            Fragment::Auto => FragmentChoice::Auto,
            Fragment::Uif => FragmentChoice::Uif,
            Fragment::Tame => FragmentChoice::Tame,
            Fragment::Definable => FragmentChoice::Definable,
        },
        verify: !cli.no_verify,
        depth: cli.depth,
        trace: cli.trace,
    };
    let (file, task) = match &cli.command {
        Command::CheckSat { file } => (file, Task::CheckSat),
        Command::Eliminate { file } => (file, Task::Eliminate),
        Command::Cover { file } => (file, Task::Cover),
        Command::GenUi { file } | Command::Verify { file } => (file, Task::GenUi),
        Command::Define { file, symbol } => (file, Task::Define(symbol.as_str().into())),
    };
    let mut problem = match load(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    problem.task = task;
    let mut opts = opts;
    if matches!(cli.command, Command::Verify { .. }) {
        opts.verify = true;
    }
    let report: Report = match pipeline::run(&problem, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    if opts.trace {
        report.trace().iter().for_each(|l| eprintln!("{l}"));
    }
    println!("{}", report.to_sexpr());
    ExitCode::from(report.exit_code() as u8)
}
