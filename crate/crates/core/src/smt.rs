//! SMT-LIB 2 backend: renders constraint systems as solver scripts, runs
//! an external solver as a subprocess, and reads models back into exact
//! rationals.
//!
//! The script protocol is deliberately plain: one `declare-const` per
//! unknown, one `assert` per conjunct, `check-sat`, then a single
//! `get-value` over every unknown. Any SMT-LIB-2 solver that reads a
//! script on standard input works; the solver to use comes from an
//! explicit command line, the `LASSOCERT_SMT` environment variable, or a
//! `z3` binary on PATH (run with `-in`), in that order.
//!
//! Every sat model is substituted back into the originating formula and
//! re-checked with exact arithmetic before it is accepted. A model that
//! does not check out is reported as a protocol error, never as sat: this
//! is the main line of defense against emitter and parser bugs.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::scalar::Scalar;
use crate::synthesis::{Constraint, ConstraintFormula, Rel, Sort, Term};

/// Solver logic to declare.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Logic {
    QfLra,
    QfLia,
    QfNra,
    QfNia,
}

impl Logic {
    pub fn as_str(self) -> &'static str {
        match self {
            Logic::QfLra => "QF_LRA",
            Logic::QfLia => "QF_LIA",
            Logic::QfNra => "QF_NRA",
            Logic::QfNia => "QF_NIA",
        }
    }

    fn is_linear(self) -> bool {
        matches!(self, Logic::QfLra | Logic::QfLia)
    }

    fn is_integer(self) -> bool {
        matches!(self, Logic::QfLia | Logic::QfNia)
    }
}

/// How to start the solver process.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCommand {
    /// Splits a command line like `"/opt/z3/bin/z3 -in"` on whitespace.
    pub fn from_line(line: &str) -> Option<SolverCommand> {
        let mut parts = line.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(SolverCommand { program, args: parts.collect() })
    }
}

/// One solver invocation's configuration.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub command: SolverCommand,
    pub timeout_ms: u64,
    pub logic: Logic,
    /// Emitted as `(set-option :random-seed …)` when present.
    pub random_seed: Option<u64>,
}

/// Classification of a solver run.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveStatus {
    Sat,
    Unsat,
    Unknown,
    Timeout,
    ProcessError,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Sat => "sat",
            SolveStatus::Unsat => "unsat",
            SolveStatus::Unknown => "unknown",
            SolveStatus::Timeout => "timeout",
            SolveStatus::ProcessError => "process-error",
        })
    }
}

/// Everything a solver run produced. `model` is present exactly for sat,
/// and only after the model survived exact re-evaluation.
#[derive(Clone, Debug)]
pub struct SolverOutcome {
    pub status: SolveStatus,
    pub model: Option<BTreeMap<String, Scalar>>,
    /// Script plus raw solver reply, for diagnostics.
    pub transcript: String,
    /// Short human-readable reason on non-sat outcomes.
    pub detail: String,
    /// Wall-clock subprocess time.
    pub solver_ms: u64,
    /// The process could not even be started.
    pub spawn_failed: bool,
}

/// An inconclusive or failed query, as an error value.
#[derive(Clone, Debug, thiserror::Error)]
#[error("solver {status}: {detail}")]
pub struct SolverFailure {
    pub status: SolveStatus,
    pub detail: String,
}

/// Picks the solver command: explicit flag value, then the LASSOCERT_SMT
/// environment variable, then `z3 -in` if a `z3` binary is on PATH.
pub fn resolve_solver(explicit: Option<&str>) -> Result<SolverCommand, String> {
    if let Some(line) = explicit {
        return SolverCommand::from_line(line)
            .ok_or_else(|| "empty --solver command line".to_string());
    }
    if let Ok(line) = std::env::var("LASSOCERT_SMT") {
        if !line.trim().is_empty() {
            return SolverCommand::from_line(&line)
                .ok_or_else(|| "empty LASSOCERT_SMT command line".to_string());
        }
    }
    let path = std::env::var_os("PATH").unwrap_or_default();
    for dir in std::env::split_paths(&path) {
        let candidate = dir.join("z3");
        if candidate.is_file() {
            return Ok(SolverCommand {
                program: candidate.to_string_lossy().into_owned(),
                args: vec!["-in".to_string()],
            });
        }
    }
    Err("no --solver given, LASSOCERT_SMT unset, and no z3 on PATH".to_string())
}

fn format_scalar(s: &Scalar) -> String {
    let positive = if s.is_negative() { -s.clone() } else { s.clone() };
    let body = if positive.is_integer() {
        positive.numer().to_string()
    } else {
        format!("(/ {} {})", positive.numer(), positive.denom())
    };
    if s.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn format_term(t: &Term, names: &[String]) -> String {
    let factors: Vec<&str> = t.unknowns.iter().map(|&u| names[u].as_str()).collect();
    if factors.is_empty() {
        return format_scalar(&t.coeff);
    }
    if t.coeff == Scalar::one() {
        if factors.len() == 1 {
            return factors[0].to_string();
        }
        return format!("(* {})", factors.join(" "));
    }
    format!("(* {} {})", format_scalar(&t.coeff), factors.join(" "))
}

fn format_sum(terms: &[Term], names: &[String]) -> String {
    match terms.len() {
        0 => "0".to_string(),
        1 => format_term(&terms[0], names),
        _ => {
            let parts: Vec<String> = terms.iter().map(|t| format_term(t, names)).collect();
            format!("(+ {})", parts.join(" "))
        }
    }
}

fn rel_symbol(rel: Rel) -> &'static str {
    match rel {
        Rel::Le => "<=",
        Rel::Lt => "<",
        Rel::Ge => ">=",
        Rel::Eq => "=",
    }
}

/// Multiplies every coefficient and the bound by the lcm of their
/// denominators, so integer logics see integer literals only. Scaling by
/// a positive constant preserves the constraint.
fn clear_denominators(c: &Constraint) -> Constraint {
    let mut scale = Scalar::one();
    let mut bump = |s: &Scalar| {
        if !s.is_integer() {
            let denom = Scalar::from_big(s.denom().clone(), 1.into());
            let current_denom = scale.denom().clone();
            // lcm over the accumulated scale: multiply and divide by gcd.
            let _ = current_denom;
            scale = lcm_scalar(&scale, &denom);
        }
    };
    for t in &c.terms {
        bump(&t.coeff);
    }
    bump(&c.bound);
    if scale == Scalar::one() {
        return c.clone();
    }
    Constraint {
        terms: c
            .terms
            .iter()
            .map(|t| Term { coeff: t.coeff.clone() * scale.clone(), unknowns: t.unknowns.clone() })
            .collect(),
        rel: c.rel,
        bound: c.bound.clone() * scale.clone(),
    }
}

fn lcm_scalar(a: &Scalar, b: &Scalar) -> Scalar {
    use num_integer::Integer;
    Scalar::from_big(a.numer().lcm(b.numer()), 1.into())
}

/// Renders the script. Output is deterministic: byte-identical for
/// identical formula and configuration.
pub fn emit_script(f: &ConstraintFormula, cfg: &SolverConfig) -> String {
    let integer = cfg.logic.is_integer();
    for u in &f.unknowns {
        let is_int = u.sort == Sort::Integer;
        assert_eq!(is_int, integer, "unknown sorts do not match logic {}", cfg.logic.as_str());
    }
    assert!(
        !(cfg.logic.is_linear() && f.max_degree() > 1),
        "nonlinear formula under linear logic {}",
        cfg.logic.as_str()
    );

    let names: Vec<String> = f.unknowns.iter().map(|u| u.name.clone()).collect();
    let sort = if integer { "Int" } else { "Real" };
    let mut script = String::new();
    script.push_str(&format!("(set-logic {})\n", cfg.logic.as_str()));
    if let Some(seed) = cfg.random_seed {
        script.push_str(&format!("(set-option :random-seed {seed})\n"));
    }
    for name in &names {
        script.push_str(&format!("(declare-const {name} {sort})\n"));
    }
    for c in &f.constraints {
        let c = if integer { clear_denominators(c) } else { c.clone() };
        script.push_str(&format!(
            "(assert ({} {} {}))\n",
            rel_symbol(c.rel),
            format_sum(&c.terms, &names),
            format_scalar(&c.bound)
        ));
    }
    script.push_str("(check-sat)\n");
    if !names.is_empty() {
        script.push_str(&format!("(get-value ({}))\n", names.join(" ")));
    }
    script
}

/// Runs one query: spawns the solver, feeds the script on stdin, enforces
/// the wall-clock timeout (killing the process on expiry), classifies the
/// first reply line, and on sat parses and re-verifies the model.
pub fn solve(f: &ConstraintFormula, cfg: &SolverConfig) -> SolverOutcome {
    assert!(cfg.timeout_ms > 0, "timeout must be positive");
    let script = emit_script(f, cfg);
    let started = Instant::now();

    let mut command = Command::new(&cfg.command.program);
    command
        .args(&cfg.command.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    #[cfg(unix)]
    {
        // Own process group, so a timeout can take down the solver's
        // children too (some solvers are wrapper scripts that fork).
        use std::os::unix::process::CommandExt;
        command.process_group(0);
    }
    let mut child = match command.spawn() {
        Ok(child) => child,
        Err(e) => {
            return SolverOutcome {
                status: SolveStatus::ProcessError,
                model: None,
                transcript: script,
                detail: format!("failed to spawn `{}`: {e}", cfg.command.program),
                solver_ms: 0,
                spawn_failed: true,
            }
        }
    };

    // Feeding stdin can fail if the solver exits immediately; that shows
    // up in the classification below, so the write result is advisory.
    let stdin_note = {
        let mut stdin = child.stdin.take().expect("piped stdin");
        match stdin.write_all(script.as_bytes()) {
            Ok(()) => None,
            Err(e) => Some(format!("stdin write failed: {e}")),
        }
        // Dropping stdin closes the pipe and lets the solver finish.
    };

    let stdout_pipe = child.stdout.take().expect("piped stdout");
    let stderr_pipe = child.stderr.take().expect("piped stderr");
    // Readers report over channels rather than being joined: if a stray
    // grandchild keeps a pipe open, the bounded receive below still lets
    // the query return on time.
    let (stdout_tx, stdout_rx) = std::sync::mpsc::channel();
    let (stderr_tx, stderr_rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let _ = stdout_tx.send(read_all(stdout_pipe));
    });
    std::thread::spawn(move || {
        let _ = stderr_tx.send(read_all(stderr_pipe));
    });

    let timeout = Duration::from_millis(cfg.timeout_ms);
    let mut timed_out = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if started.elapsed() >= timeout {
                    kill_tree(&mut child);
                    timed_out = true;
                    break;
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(_) => break,
        }
    }

    let grace = Duration::from_millis(1_000);
    let stdout = stdout_rx.recv_timeout(grace).unwrap_or_default();
    let stderr = stderr_rx.recv_timeout(grace).unwrap_or_default();
    let solver_ms = started.elapsed().as_millis() as u64;
    let transcript = format!("{script}---- stdout ----\n{stdout}---- stderr ----\n{stderr}");

    let mut outcome = SolverOutcome {
        status: SolveStatus::ProcessError,
        model: None,
        transcript,
        detail: String::new(),
        solver_ms,
        spawn_failed: false,
    };

    if timed_out {
        outcome.status = SolveStatus::Timeout;
        outcome.detail = format!("wall-clock timeout after {} ms", cfg.timeout_ms);
        return outcome;
    }

    let mut lines = stdout.lines().map(str::trim).filter(|l| !l.is_empty());
    let verdict_line = lines.next().unwrap_or("");
    match verdict_line {
        "unsat" => {
            outcome.status = SolveStatus::Unsat;
            outcome.detail = "unsat".to_string();
        }
        "unknown" => {
            outcome.status = SolveStatus::Unknown;
            outcome.detail = "solver answered unknown".to_string();
        }
        "sat" => {
            let rest: String = stdout
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .skip(1)
                .collect::<Vec<_>>()
                .join(" ");
            match parse_model(&rest) {
                Ok(model) => match f.value_vector(&model) {
                    Some(values) if f.satisfied_by(&values) => {
                        outcome.status = SolveStatus::Sat;
                        outcome.model = Some(model);
                    }
                    Some(_) => {
                        outcome.detail =
                            "sat model fails exact re-evaluation of the formula".to_string();
                    }
                    None => {
                        outcome.detail = "sat model omitted a declared unknown".to_string();
                    }
                },
                Err(e) => outcome.detail = format!("could not parse model: {e}"),
            }
        }
        other => {
            outcome.detail = match (&stdin_note, other.is_empty()) {
                (Some(note), _) => format!("{note}; no solver verdict"),
                (None, true) => "solver produced no verdict".to_string(),
                (None, false) => format!("unrecognized solver reply `{other}`"),
            };
            if !stderr.trim().is_empty() && outcome.detail.len() < 200 {
                outcome.detail.push_str(&format!("; stderr: {}", stderr.trim()));
            }
        }
    }
    outcome
}

fn kill_tree(child: &mut std::process::Child) {
    #[cfg(unix)]
    unsafe {
        // The child was started as its own process group leader.
        libc::killpg(child.id() as i32, libc::SIGKILL);
    }
    let _ = child.kill();
    let _ = child.wait();
}

fn read_all(mut pipe: impl Read) -> String {
    let mut buf = Vec::new();
    let _ = pipe.read_to_end(&mut buf);
    String::from_utf8_lossy(&buf).into_owned()
}

#[derive(Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                tokens.push(c.to_string());
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                        None => return Err("unterminated string".to_string()),
                    }
                }
                tokens.push(s);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '(' || c == ')' || c == '"' || c.is_whitespace() {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                tokens.push(atom);
            }
        }
    }
    Ok(tokens)
}

fn parse_sexps(tokens: &[String]) -> Result<Vec<Sexp>, String> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for tok in tokens {
        match tok.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack.pop().ok_or("unbalanced parentheses")?;
                stack
                    .last_mut()
                    .ok_or("unbalanced parentheses")?
                    .push(Sexp::List(done));
            }
            atom => stack
                .last_mut()
                .ok_or("unbalanced parentheses")?
                .push(Sexp::Atom(atom.to_string())),
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced parentheses".to_string());
    }
    Ok(stack.pop().unwrap())
}

fn numeral(sexp: &Sexp) -> Result<Scalar, String> {
    match sexp {
        Sexp::Atom(a) => {
            Scalar::from_str(a).map_err(|_| format!("not a numeral: `{a}`"))
        }
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(op), inner] if op == "-" => Ok(-numeral(inner)?),
            [Sexp::Atom(op), num, den] if op == "/" => {
                let d = numeral(den)?;
                if d.is_zero() {
                    return Err("division by zero in numeral".to_string());
                }
                Ok(numeral(num)? / d)
            }
            _ => Err(format!("unsupported numeral form: `{sexp:?}`")),
        },
    }
}

/// Parses one solver value s-expression into an exact rational: integer
/// and decimal literals, `(/ p q)`, `(- e)`, and nestings thereof.
pub fn parse_value(text: &str) -> Result<Scalar, String> {
    let tokens = tokenize(text)?;
    let sexps = parse_sexps(&tokens)?;
    match sexps.as_slice() {
        [single] => numeral(single),
        _ => Err("expected exactly one value expression".to_string()),
    }
}

/// Parses a `get-value` reply: a list of `(name value)` pairs.
fn parse_model(text: &str) -> Result<BTreeMap<String, Scalar>, String> {
    if text.contains("(error") {
        return Err(format!("solver error reply: {}", text.trim()));
    }
    let tokens = tokenize(text)?;
    let sexps = parse_sexps(&tokens)?;
    let mut model = BTreeMap::new();
    let mut insert_pair = |pair: &[Sexp]| -> Result<(), String> {
        match pair {
            [Sexp::Atom(name), value] => {
                model.insert(name.clone(), numeral(value)?);
                Ok(())
            }
            _ => Err("malformed (name value) pair".to_string()),
        }
    };
    for sexp in &sexps {
        match sexp {
            Sexp::List(items) => {
                for item in items {
                    match item {
                        Sexp::List(pair) => insert_pair(pair)?,
                        _ => return Err("malformed model entry".to_string()),
                    }
                }
            }
            Sexp::Atom(a) => return Err(format!("unexpected atom `{a}` in model")),
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_lasso;
    use crate::synthesis::{gnta_constraints, Sort};

    fn tiny_formula() -> ConstraintFormula {
        let p = parse_lasso("vars: x; loop: x >= 0 && x' = x + 1;").unwrap();
        gnta_constraints(&p, 1)
    }

    fn real_cfg(logic: Logic) -> SolverConfig {
        SolverConfig {
            command: SolverCommand { program: "true".to_string(), args: vec![] },
            timeout_ms: 1_000,
            logic,
            random_seed: None,
        }
    }

    #[test]
    fn scripts_are_deterministic_and_readable() {
        let f = tiny_formula();
        let cfg = real_cfg(Logic::QfNra);
        let a = emit_script(&f, &cfg);
        let b = emit_script(&f, &cfg);
        assert_eq!(a, b);
        assert!(a.starts_with("(set-logic QF_NRA)\n"));
        assert!(a.contains("(declare-const lam0 Real)\n"));
        assert!(a.contains("(assert (>= lam0 0))\n"));
        assert!(a.contains("(check-sat)\n"));
        assert!(a.contains("(get-value (x0_0 x1_0 y0_0 lam0))\n"));
    }

    #[test]
    fn negative_fractions_use_the_prefix_forms() {
        assert_eq!(format_scalar(&Scalar::from_ratio(-3, 2)), "(- (/ 3 2))");
        assert_eq!(format_scalar(&Scalar::from_int(-3)), "(- 3)");
        assert_eq!(format_scalar(&Scalar::from_ratio(22, 7)), "(/ 22 7)");
        assert_eq!(format_scalar(&Scalar::zero()), "0");
    }

    #[test]
    fn integer_logic_clears_denominators() {
        let p = parse_lasso("vars: x; loop: x >= 0 && 2x' = x;").unwrap();
        let f = gnta_constraints(&p, 0).with_sort(Sort::Integer);
        let script = emit_script(&f, &real_cfg(Logic::QfLia));
        assert!(!script.contains('/'), "no rational literals in integer mode:\n{script}");
        assert!(script.contains("(declare-const x0_0 Int)"));
    }

    #[test]
    #[should_panic(expected = "nonlinear formula under linear logic")]
    fn linear_logic_rejects_quadratic_formulas() {
        let f = tiny_formula();
        emit_script(&f, &real_cfg(Logic::QfLra));
    }

    #[test]
    fn parses_solver_numerals_exactly() {
        assert_eq!(parse_value("(- (/ 1 2))").unwrap(), Scalar::from_ratio(-1, 2));
        assert_eq!(parse_value("7.5").unwrap(), Scalar::from_ratio(15, 2));
        assert_eq!(parse_value("(/ 22 7)").unwrap(), Scalar::from_ratio(22, 7));
        assert_eq!(parse_value("3.0").unwrap(), Scalar::from_int(3));
        assert_eq!(parse_value("(- 3)").unwrap(), Scalar::from_int(-3));
        assert_eq!(
            parse_value("(- (/ 15.0 4.0))").unwrap(),
            Scalar::from_ratio(-15, 4)
        );
        assert!(parse_value("root-obj").is_err());
        assert!(parse_value("(^ 2 2)").is_err());
        assert!(parse_value("(/ 1 0)").is_err());
    }

    #[test]
    fn parses_model_pair_lists() {
        let model = parse_model("((x0_0 1) (lam0 (/ 2 3)) (mu0 (- 1.5)))").unwrap();
        assert_eq!(model["x0_0"], Scalar::from_int(1));
        assert_eq!(model["lam0"], Scalar::from_ratio(2, 3));
        assert_eq!(model["mu0"], Scalar::from_ratio(-3, 2));
        assert!(parse_model("((x0_0))").is_err());
        assert!(parse_model("(error \"line 3: busted\")").is_err());
    }

    #[test]
    fn resolves_explicit_command_lines() {
        let cmd = resolve_solver(Some("/opt/solver --smt2 -q")).unwrap();
        assert_eq!(cmd.program, "/opt/solver");
        assert_eq!(cmd.args, vec!["--smt2", "-q"]);
        assert!(resolve_solver(Some("   ")).is_err());
    }

    fn fake_solver(reply_script: &str) -> SolverConfig {
        SolverConfig {
            command: SolverCommand {
                program: "sh".to_string(),
                args: vec!["-c".to_string(), reply_script.to_string()],
            },
            timeout_ms: 5_000,
            logic: Logic::QfNra,
            random_seed: None,
        }
    }

    #[test]
    fn classifies_unsat_replies() {
        let f = tiny_formula();
        let outcome = solve(&f, &fake_solver("cat > /dev/null; echo unsat"));
        assert_eq!(outcome.status, SolveStatus::Unsat);
        assert!(outcome.model.is_none());
    }

    #[test]
    fn accepts_faithful_models_only() {
        let f = tiny_formula();
        // x0=0, x1=0, y=1, lam=1 satisfies the system.
        let good = "cat > /dev/null; echo sat; echo '((x0_0 0) (x1_0 0) (y0_0 1) (lam0 1))'";
        let outcome = solve(&f, &fake_solver(good));
        assert_eq!(outcome.status, SolveStatus::Sat, "detail: {}", outcome.detail);
        assert_eq!(outcome.model.unwrap()["y0_0"], Scalar::one());

        // lam=2 breaks the ray rows; the backend must refuse the "model".
        let bad = "cat > /dev/null; echo sat; echo '((x0_0 0) (x1_0 0) (y0_0 1) (lam0 2))'";
        let outcome = solve(&f, &fake_solver(bad));
        assert_eq!(outcome.status, SolveStatus::ProcessError);
        assert!(outcome.detail.contains("re-evaluation"), "detail: {}", outcome.detail);
    }

    #[test]
    fn kills_overrunning_solvers() {
        let f = tiny_formula();
        let mut cfg = fake_solver("sleep 30");
        cfg.timeout_ms = 200;
        let started = Instant::now();
        let outcome = solve(&f, &cfg);
        assert_eq!(outcome.status, SolveStatus::Timeout);
        assert!(started.elapsed() < Duration::from_millis(1_200), "kill was not prompt");
    }

    #[test]
    fn reports_spawn_failures() {
        let f = tiny_formula();
        let mut cfg = fake_solver("");
        cfg.command = SolverCommand { program: "/nonexistent/solver-zz".to_string(), args: vec![] };
        let outcome = solve(&f, &cfg);
        assert_eq!(outcome.status, SolveStatus::ProcessError);
        assert!(outcome.spawn_failed);
    }
}
