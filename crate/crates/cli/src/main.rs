use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use lassocert::synthesis::AnalysisMode;
use lassocert_cli::bench::{cmd_bench, BenchArgs};
use lassocert_cli::{cmd_analyze, cmd_simulate, cmd_validate, AnalyzeArgs};

#[derive(Parser)]
#[command(
    name = "lassocert",
    version,
    about = "Decides nontermination of conjunctive linear lasso programs \
             via geometric certificates, and termination of nilpotent \
             loops via nested ranking functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Full pipeline: fixed point, nested ranking, then ray synthesis.
    Auto,
    /// Fixed-point search only (linear arithmetic).
    Fixedpoint,
    /// Full geometric pipeline (same as auto).
    Gnta,
}

impl From<ModeArg> for AnalysisMode {
    fn from(m: ModeArg) -> AnalysisMode {
        match m {
            ModeArg::Auto => AnalysisMode::Auto,
            ModeArg::Fixedpoint => AnalysisMode::FixedPoint,
            ModeArg::Gnta => AnalysisMode::Gnta,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a program and write a certificate or witness on success
    Analyze {
        /// Path to the `.lasso` program
        program: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Largest certificate size to try (default: the dimension)
        #[arg(long, value_name = "K")]
        max_size: Option<usize>,
        /// Search over the integers (QF_LIA/QF_NIA) instead of the rationals
        #[arg(long = "int")]
        integer_mode: bool,
        /// Wall-clock budget per solver query
        #[arg(long, default_value_t = 12_000, value_name = "MS")]
        timeout_ms: u64,
        /// Solver command line, e.g. "z3 -in" (default: $LASSOCERT_SMT, then z3 on PATH)
        #[arg(long, value_name = "CMD")]
        solver: Option<String>,
        /// Where to write the certificate or witness (default: next to the program)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check a certificate or witness file against a program
    Validate {
        program: PathBuf,
        /// Certificate file (default: `<program>.cert.json`)
        #[arg(long, value_name = "FILE")]
        cert: Option<PathBuf>,
    },
    /// Print the certified run and check it against the loop relation
    Simulate {
        program: PathBuf,
        /// Certificate file (default: `<program>.cert.json`)
        #[arg(long, value_name = "FILE")]
        cert: Option<PathBuf>,
        /// Number of states to print
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Run both analysis settings over a corpus directory, write a CSV
    Bench {
        /// Directory of `.lasso` files
        dir: PathBuf,
        /// Worker threads (default: one per CPU)
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
        /// Largest certificate size to try per program
        #[arg(long, value_name = "K")]
        max_size: Option<usize>,
        /// Search over the integers instead of the rationals
        #[arg(long = "int")]
        integer_mode: bool,
        /// Wall-clock budget per solver query
        #[arg(long, default_value_t = 12_000, value_name = "MS")]
        timeout_ms: u64,
        /// Solver command line (default: $LASSOCERT_SMT, then z3 on PATH)
        #[arg(long, value_name = "CMD")]
        solver: Option<String>,
        /// CSV report path (default: bench.csv)
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze { program, mode, max_size, integer_mode, timeout_ms, solver, out } => {
            cmd_analyze(&AnalyzeArgs {
                program,
                mode: mode.into(),
                max_size,
                integer_mode,
                timeout_ms,
                solver,
                out,
            })
        }
        Command::Validate { program, cert } => cmd_validate(&program, cert.as_deref()),
        Command::Simulate { program, cert, steps } => {
            cmd_simulate(&program, cert.as_deref(), steps)
        }
        Command::Bench { dir, jobs, max_size, integer_mode, timeout_ms, solver, out } => {
            cmd_bench(&BenchArgs { dir, jobs, max_size, integer_mode, timeout_ms, solver, out })
        }
    };
    std::process::exit(code);
}
