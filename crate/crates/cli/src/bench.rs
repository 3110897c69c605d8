//! Corpus benchmark harness: every `.lasso` file in a directory is
//! analyzed twice, once restricted to fixed-point search and once with
//! the full geometric pipeline, and the outcomes land in a CSV plus a
//! per-mode summary. One misbehaving program (unparseable, solver crash)
//! becomes an `error` row; the rest of the run proceeds.

use std::path::{Path, PathBuf};

use lassocert::model::parse_lasso;
use lassocert::synthesis::{analyze, AnalysisMode, SynthesisOptions};

use crate::{EXIT_INFRA, EXIT_OK};

#[derive(Clone, Debug)]
pub struct BenchArgs {
    pub dir: PathBuf,
    pub jobs: Option<usize>,
    pub max_size: Option<usize>,
    pub integer_mode: bool,
    pub timeout_ms: u64,
    pub solver: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub program: String,
    pub mode: &'static str,
    pub verdict: String,
    pub k: Option<usize>,
    pub strategy: String,
    pub wall_ms: u64,
    pub solver_ms: u64,
}

fn mode_name(mode: AnalysisMode) -> &'static str {
    match mode {
        AnalysisMode::FixedPoint => "fixedpoint",
        _ => "gnta",
    }
}

fn run_one(path: &Path, mode: AnalysisMode, args: &BenchArgs) -> BenchRecord {
    let program_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let mut record = BenchRecord {
        program: program_name,
        mode: mode_name(mode),
        verdict: "error".to_string(),
        k: None,
        strategy: "none".to_string(),
        wall_ms: 0,
        solver_ms: 0,
    };

    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(_) => return record,
    };
    let program = match parse_lasso(&text) {
        Ok(p) => p,
        Err(_) => return record,
    };
    let opts = SynthesisOptions {
        mode,
        max_size: args.max_size,
        integer_mode: args.integer_mode,
        timeout_ms: args.timeout_ms,
        solver: args.solver.clone(),
    };
    match analyze(&program, &opts) {
        Ok(run) => {
            record.verdict = run.verdict.name().to_string();
            record.k = run.size;
            record.strategy =
                run.strategy.map(|s| s.to_string()).unwrap_or_else(|| "none".to_string());
            record.wall_ms = run.wall_ms;
            record.solver_ms = run.solver_ms;
        }
        Err(_) => {}
    }
    record
}

fn write_csv(path: &Path, records: &[BenchRecord]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    w.write_record(["program", "mode", "verdict", "k", "strategy", "wall_ms", "solver_ms"])
        .map_err(|e| e.to_string())?;
    for r in records {
        w.write_record([
            r.program.as_str(),
            r.mode,
            r.verdict.as_str(),
            &r.k.map(|k| k.to_string()).unwrap_or_default(),
            r.strategy.as_str(),
            &r.wall_ms.to_string(),
            &r.solver_ms.to_string(),
        ])
        .map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

struct ModeSummary {
    nonterminating: usize,
    terminating: usize,
    unknown: usize,
    error: usize,
    solver_ms: u64,
}

fn summarize<'a>(records: impl Iterator<Item = &'a BenchRecord>) -> ModeSummary {
    let mut s =
        ModeSummary { nonterminating: 0, terminating: 0, unknown: 0, error: 0, solver_ms: 0 };
    for r in records {
        match r.verdict.as_str() {
            "nonterminating" => s.nonterminating += 1,
            "terminating" => s.terminating += 1,
            "unknown" => s.unknown += 1,
            _ => s.error += 1,
        }
        s.solver_ms += r.solver_ms;
    }
    s
}

pub fn cmd_bench(args: &BenchArgs) -> i32 {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(&args.dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map(|x| x == "lasso").unwrap_or(false))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.dir.display());
            return EXIT_INFRA;
        }
    };
    files.sort();

    let tasks: Vec<(PathBuf, AnalysisMode)> = files
        .iter()
        .flat_map(|f| {
            [(f.clone(), AnalysisMode::FixedPoint), (f.clone(), AnalysisMode::Gnta)]
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_INFRA;
        }
    };
    let records: Vec<BenchRecord> = pool.install(|| {
        use rayon::prelude::*;
        tasks.par_iter().map(|(path, mode)| run_one(path, *mode, args)).collect()
    });

    let csv_path = args.out.clone().unwrap_or_else(|| PathBuf::from("bench.csv"));
    if let Err(e) = write_csv(&csv_path, &records) {
        eprintln!("error: {e}");
        return EXIT_INFRA;
    }

    for r in &records {
        println!(
            "{:<24} {:<10} {:<15} k={:<3} {:<14} {:>6} ms wall {:>6} ms solver",
            r.program,
            r.mode,
            r.verdict,
            r.k.map(|k| k.to_string()).unwrap_or_else(|| "-".to_string()),
            r.strategy,
            r.wall_ms,
            r.solver_ms
        );
    }

    // Regression sidecars: `<stem>.expected` holds the verdict the full
    // pipeline is supposed to reach.
    let mut mismatches = 0;
    for file in &files {
        let sidecar = file.with_extension("expected");
        let Ok(expected) = std::fs::read_to_string(&sidecar) else { continue };
        let expected = expected.trim();
        let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let got = records
            .iter()
            .find(|r| r.mode == "gnta" && r.program == stem)
            .map(|r| r.verdict.as_str())
            .unwrap_or("missing");
        if got != expected {
            println!("MISMATCH {stem}: expected {expected}, got {got}");
            mismatches += 1;
        }
    }

    println!();
    println!("{:<12} {:>8} {:>8} {:>8} {:>8} {:>12}", "mode", "nonterm", "term", "unknown", "error", "solver_ms");
    for mode in ["fixedpoint", "gnta"] {
        let s = summarize(records.iter().filter(|r| r.mode == mode));
        println!(
            "{:<12} {:>8} {:>8} {:>8} {:>8} {:>12}",
            mode, s.nonterminating, s.terminating, s.unknown, s.error, s.solver_ms
        );
    }
    if mismatches > 0 {
        println!("{mismatches} expectation mismatch(es)");
    }
    println!("report: {}", csv_path.display());
    EXIT_OK
}
