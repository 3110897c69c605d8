//! Command implementations behind the `lassocert` binary.
//!
//! Exit-code convention: verdicts are data, not exit codes. `analyze`
//! exits 0 whenever the analysis ran to completion (nonterminating,
//! terminating, and unknown alike), 2 on usage or parse problems, and 3
//! when the solver infrastructure failed. `validate` exits 1 for a
//! certificate that does not check out, `simulate` exits 1 naming the
//! first step that leaves the loop relation, and `bench` always exits 0,
//! isolating per-program faults into their report rows.

use std::path::{Path, PathBuf};

use lassocert::cert::{self, GntaCertificate};
use lassocert::eigen::{self, NestedRankingWitness};
use lassocert::linalg::ExactVector;
use lassocert::model::{detect_deterministic, holds, parse_lasso, LassoProgram};
use lassocert::synthesis::{
    analyze, AnalysisError, AnalysisMode, AnalysisVerdict, SynthesisOptions,
};

pub mod bench;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFRA: i32 = 3;

/// Reads and parses a `.lasso` file; errors are usage-class.
fn load_program(path: &Path) -> Result<LassoProgram, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_lasso(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// `<dir>/<stem>.<suffix>` next to the input program.
fn sibling(program: &Path, suffix: &str) -> PathBuf {
    program.with_extension(suffix)
}

fn format_state(v: &ExactVector) -> String {
    let entries: Vec<String> = v.iter().map(|s| s.to_string()).collect();
    format!("({})", entries.join(", "))
}

#[derive(Clone, Debug)]
pub struct AnalyzeArgs {
    pub program: PathBuf,
    pub mode: AnalysisMode,
    pub max_size: Option<usize>,
    pub integer_mode: bool,
    pub timeout_ms: u64,
    pub solver: Option<String>,
    pub out: Option<PathBuf>,
}

impl AnalyzeArgs {
    pub fn options(&self) -> SynthesisOptions {
        SynthesisOptions {
            mode: self.mode,
            max_size: self.max_size,
            integer_mode: self.integer_mode,
            timeout_ms: self.timeout_ms,
            solver: self.solver.clone(),
        }
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> i32 {
    let program = match load_program(&args.program) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    let run = match analyze(&program, &args.options()) {
        Ok(run) => run,
        Err(AnalysisError::SolverUnavailable(failure)) => {
            eprintln!("error: no usable solver: {failure}");
            return EXIT_INFRA;
        }
        Err(e) => {
            eprintln!("internal error: {e}");
            return EXIT_INFRA;
        }
    };

    match &run.verdict {
        AnalysisVerdict::Nonterminating(cert) => {
            let strategy = run
                .strategy
                .map(|s| s.to_string())
                .unwrap_or_else(|| "?".to_string());
            println!(
                "verdict: nonterminating (size {}, strategy {strategy}, {} ms wall, {} ms solver)",
                cert.size(),
                run.wall_ms,
                run.solver_ms
            );
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| sibling(&args.program, "cert.json"));
            let text = cert::serialize(cert, &program.var_names);
            if let Err(e) = std::fs::write(&out, text) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return EXIT_INFRA;
            }
            println!("certificate: {}", out.display());
        }
        AnalysisVerdict::Terminating(witness) => {
            println!(
                "verdict: terminating (nested ranking, depth {}, {} ms wall)",
                witness.nilpotence_index, run.wall_ms
            );
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| sibling(&args.program, "witness.json"));
            let text = eigen::serialize_witness(witness, &program.var_names);
            if let Err(e) = std::fs::write(&out, text) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return EXIT_INFRA;
            }
            println!("witness: {}", out.display());
        }
        AnalysisVerdict::Unknown(reason) => {
            println!(
                "verdict: unknown ({} ms wall, {} ms solver)",
                run.wall_ms, run.solver_ms
            );
            println!("  {reason}");
        }
    }
    EXIT_OK
}

enum CertificateFile {
    Gnta(GntaCertificate, Vec<String>),
    Witness(NestedRankingWitness, Vec<String>),
}

fn load_certificate(path: &Path) -> Result<CertificateFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    match cert::deserialize(&text) {
        Ok((c, vars)) => Ok(CertificateFile::Gnta(c, vars)),
        Err(cert_err) => match eigen::deserialize_witness(&text) {
            Ok((w, vars)) => Ok(CertificateFile::Witness(w, vars)),
            Err(_) => Err(format!("{}: {cert_err}", path.display())),
        },
    }
}

pub fn cmd_validate(program_path: &Path, cert_path: Option<&Path>) -> i32 {
    let program = match load_program(program_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cert_path =
        cert_path.map(Path::to_path_buf).unwrap_or_else(|| sibling(program_path, "cert.json"));
    let loaded = match load_certificate(&cert_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };

    match loaded {
        CertificateFile::Gnta(cert, vars) => {
            if vars != program.var_names {
                eprintln!(
                    "error: certificate is over variables ({}) but the program declares ({})",
                    vars.join(", "),
                    program.var_names.join(", ")
                );
                return EXIT_USAGE;
            }
            let report = cert::validate(&program, &cert);
            print!("{report}");
            if report.passed() {
                println!("certificate: pass");
                EXIT_OK
            } else {
                println!("certificate: FAIL");
                EXIT_FAIL
            }
        }
        CertificateFile::Witness(witness, vars) => {
            if vars != program.var_names {
                eprintln!(
                    "error: witness is over variables ({}) but the program declares ({})",
                    vars.join(", "),
                    program.var_names.join(", ")
                );
                return EXIT_USAGE;
            }
            let Some(update) = detect_deterministic(&program.loop_) else {
                eprintln!("error: the loop is not a deterministic update; a nested ranking witness does not apply");
                return EXIT_USAGE;
            };
            match eigen::validate_witness(&update, &witness) {
                Ok(()) => {
                    println!("nested ranking witness: pass (depth {})", witness.nilpotence_index);
                    EXIT_OK
                }
                Err(defect) => {
                    println!("nested ranking witness: FAIL ({defect})");
                    EXIT_FAIL
                }
            }
        }
    }
}

pub fn cmd_simulate(program_path: &Path, cert_path: Option<&Path>, steps: usize) -> i32 {
    let program = match load_program(program_path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cert_path =
        cert_path.map(Path::to_path_buf).unwrap_or_else(|| sibling(program_path, "cert.json"));
    let (cert, vars) = match load_certificate(&cert_path) {
        Ok(CertificateFile::Gnta(c, vars)) => (c, vars),
        Ok(CertificateFile::Witness(..)) => {
            eprintln!("error: {} holds a termination witness; only geometric certificates describe a run", cert_path.display());
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if vars != program.var_names || cert.dim() != program.dim() {
        eprintln!("error: certificate does not match the program's variables");
        return EXIT_USAGE;
    }

    let states = cert::unroll(&program, &cert, steps);
    for (t, state) in states.iter().enumerate() {
        println!("t={t}: {}", format_state(state));
    }
    if states.len() >= 2 && !holds(&program.stem, &states[0], &states[1]) {
        eprintln!("error: step 0 -> 1 violates the stem relation");
        return EXIT_FAIL;
    }
    for (t, pair) in states.windows(2).enumerate().skip(1) {
        if !holds(&program.loop_, &pair[0], &pair[1]) {
            eprintln!("error: step {t} -> {} violates the loop relation", t + 1);
            return EXIT_FAIL;
        }
    }
    EXIT_OK
}
