//! Constraint encodings whose models are nontermination certificates, and
//! the strategy pipeline that searches for them.
//!
//! The encoding is existential: unknowns for the stem endpoints, the rays,
//! and the ray-evolution coefficients, with one conjunct per program row.
//! For a certificate of size k the (ray) block multiplies λ/μ unknowns by
//! ray coordinates, so the full formula is quadratic; fixing λ and μ to
//! concrete values (eigenvalues, and a 0/1 superdiagonal) makes every
//! conjunct linear, which is the cheap strategy the pipeline tries before
//! falling back to the nonlinear query.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use crate::cert::{validate, GntaCertificate};
use crate::eigen::{
    char_poly, nested_ranking_check, rational_spectrum, shift_nilpotence_index, validate_witness,
    NestedRankingWitness,
};
use crate::linalg::ExactVector;
use crate::model::{detect_deterministic, DeterministicUpdate, LassoProgram};
use crate::scalar::Scalar;
use crate::smt::{self, Logic, SolverCommand, SolverConfig, SolveStatus, SolverFailure};

/// Solver-side type of an unknown.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sort {
    Rational,
    Integer,
}

/// A named unknown of the constraint system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Unknown {
    pub name: String,
    pub sort: Sort,
}

/// `coeff · Π unknowns`; at most two factors, and two only for the
/// λ/μ-times-ray products of the (ray) block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Term {
    pub coeff: Scalar,
    pub unknowns: Vec<usize>,
}

/// Comparison against the bound.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Le,
    Lt,
    Ge,
    Eq,
}

/// One conjunct: `Σ terms REL bound`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub rel: Rel,
    pub bound: Scalar,
}

/// A conjunction of polynomial constraints over named unknowns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstraintFormula {
    pub unknowns: Vec<Unknown>,
    pub constraints: Vec<Constraint>,
}

impl ConstraintFormula {
    fn new() -> Self {
        ConstraintFormula { unknowns: Vec::new(), constraints: Vec::new() }
    }

    fn add_unknown(&mut self, name: String) -> usize {
        self.unknowns.push(Unknown { name, sort: Sort::Rational });
        self.unknowns.len() - 1
    }

    /// Re-tags every unknown, for integer-mode queries.
    pub fn with_sort(mut self, sort: Sort) -> Self {
        for u in &mut self.unknowns {
            u.sort = sort;
        }
        self
    }

    /// Highest monomial degree across all conjuncts.
    pub fn max_degree(&self) -> usize {
        self.constraints
            .iter()
            .flat_map(|c| c.terms.iter())
            .map(|t| t.unknowns.len())
            .max()
            .unwrap_or(0)
    }

    /// Orders a model map into a value slice matching `unknowns`;
    /// absent names yield `None`.
    pub fn value_vector(&self, model: &BTreeMap<String, Scalar>) -> Option<Vec<Scalar>> {
        self.unknowns.iter().map(|u| model.get(&u.name).cloned()).collect()
    }

    /// Exact evaluation of the whole conjunction.
    pub fn satisfied_by(&self, values: &[Scalar]) -> bool {
        self.first_violated(values).is_none()
    }

    /// Index of the first conjunct the values break, if any.
    pub fn first_violated(&self, values: &[Scalar]) -> Option<usize> {
        assert_eq!(values.len(), self.unknowns.len(), "value count mismatch");
        self.constraints.iter().position(|c| !constraint_holds(c, values))
    }
}

fn constraint_holds(c: &Constraint, values: &[Scalar]) -> bool {
    let mut lhs = Scalar::zero();
    for t in &c.terms {
        let mut v = t.coeff.clone();
        for &u in &t.unknowns {
            v = v * values[u].clone();
        }
        lhs += v;
    }
    match c.rel {
        Rel::Le => !(lhs.clone() - c.bound.clone()).is_positive(),
        Rel::Lt => (lhs.clone() - c.bound.clone()).is_negative(),
        Rel::Ge => !(c.bound.clone() - lhs.clone()).is_positive(),
        Rel::Eq => lhs == c.bound,
    }
}

pub(crate) fn x0_name(i: usize) -> String {
    format!("x0_{i}")
}

pub(crate) fn x1_name(i: usize) -> String {
    format!("x1_{i}")
}

pub(crate) fn ray_name(j: usize, i: usize) -> String {
    format!("y{j}_{i}")
}

pub(crate) fn lambda_name(j: usize) -> String {
    format!("lam{j}")
}

pub(crate) fn mu_name(j: usize) -> String {
    format!("mu{j}")
}

/// Either λ/μ stay symbolic, or they are pinned to concrete values and the
/// (ray) block degenerates to linear constraints.
enum RayScale<'a> {
    Free,
    Fixed { lambdas: &'a [Scalar], mus: &'a [Scalar] },
}

/// Accumulates monomials keyed by their (sorted) factor lists, so equal
/// monomials merge and emission order is canonical.
struct TermSink {
    map: BTreeMap<Vec<usize>, Scalar>,
}

impl TermSink {
    fn new() -> Self {
        TermSink { map: BTreeMap::new() }
    }

    fn add(&mut self, mut unknowns: Vec<usize>, coeff: Scalar) {
        debug_assert!(unknowns.len() <= 2, "degree above 2");
        if coeff.is_zero() {
            return;
        }
        unknowns.sort_unstable();
        *self.map.entry(unknowns).or_insert_with(Scalar::zero) += coeff;
    }

    fn finish(self) -> Vec<Term> {
        self.map
            .into_iter()
            .filter(|(_, coeff)| !coeff.is_zero())
            .map(|(unknowns, coeff)| Term { coeff, unknowns })
            .collect()
    }
}

fn row_rel(strict: bool) -> Rel {
    if strict {
        Rel::Lt
    } else {
        Rel::Le
    }
}

fn build_gnta(p: &LassoProgram, k: usize, scale: RayScale<'_>) -> ConstraintFormula {
    let n = p.dim();
    let mut f = ConstraintFormula::new();
    let x0: Vec<usize> = (0..n).map(|i| f.add_unknown(x0_name(i))).collect();
    let x1: Vec<usize> = (0..n).map(|i| f.add_unknown(x1_name(i))).collect();
    let rays: Vec<Vec<usize>> = (0..k)
        .map(|j| (0..n).map(|i| f.add_unknown(ray_name(j, i))).collect())
        .collect();
    let free = matches!(scale, RayScale::Free);
    let lams: Vec<usize> = if free { (0..k).map(|j| f.add_unknown(lambda_name(j))).collect() } else { Vec::new() };
    let mus: Vec<usize> = if free {
        (0..k.saturating_sub(1)).map(|j| f.add_unknown(mu_name(j))).collect()
    } else {
        Vec::new()
    };

    // Domain: λ, μ >= 0. With pinned values there is nothing to assert;
    // candidates are nonnegative by construction.
    for &id in lams.iter().chain(mus.iter()) {
        f.constraints.push(Constraint {
            terms: vec![Term { coeff: Scalar::one(), unknowns: vec![id] }],
            rel: Rel::Ge,
            bound: Scalar::zero(),
        });
    }

    // Initiation: stem rows over (x0, x1).
    for row in &p.stem.rows {
        let mut sink = TermSink::new();
        for i in 0..n {
            sink.add(vec![x0[i]], row.coeffs_x[i].clone());
            sink.add(vec![x1[i]], row.coeffs_xp[i].clone());
        }
        f.constraints.push(Constraint {
            terms: sink.finish(),
            rel: row_rel(row.strict),
            bound: row.bound.clone(),
        });
    }

    // Point: loop rows over (x1, x1 + Σ rays).
    for row in &p.loop_.rows {
        let mut sink = TermSink::new();
        for i in 0..n {
            sink.add(vec![x1[i]], row.coeffs_x[i].clone() + row.coeffs_xp[i].clone());
            for ray in &rays {
                sink.add(vec![ray[i]], row.coeffs_xp[i].clone());
            }
        }
        f.constraints.push(Constraint {
            terms: sink.finish(),
            rel: row_rel(row.strict),
            bound: row.bound.clone(),
        });
    }

    // Ray blocks: coefficient rows over (y_j, λ_j·y_j + μ_(j-1)·y_(j-1)),
    // nonstrict: rays are directions, not states.
    for j in 0..k {
        for row in &p.loop_.rows {
            let mut sink = TermSink::new();
            for i in 0..n {
                sink.add(vec![rays[j][i]], row.coeffs_x[i].clone());
                match &scale {
                    RayScale::Free => {
                        sink.add(vec![rays[j][i], lams[j]], row.coeffs_xp[i].clone());
                        if j > 0 {
                            sink.add(vec![rays[j - 1][i], mus[j - 1]], row.coeffs_xp[i].clone());
                        }
                    }
                    RayScale::Fixed { lambdas, mus } => {
                        sink.add(vec![rays[j][i]], row.coeffs_xp[i].clone() * lambdas[j].clone());
                        if j > 0 {
                            sink.add(
                                vec![rays[j - 1][i]],
                                row.coeffs_xp[i].clone() * mus[j - 1].clone(),
                            );
                        }
                    }
                }
            }
            f.constraints.push(Constraint {
                terms: sink.finish(),
                rel: Rel::Le,
                bound: Scalar::zero(),
            });
        }
    }

    f
}

/// The full constraint system for certificates of size `k`: quadratic for
/// `k >= 1`, linear for `k = 0`.
pub fn gnta_constraints(p: &LassoProgram, k: usize) -> ConstraintFormula {
    build_gnta(p, k, RayScale::Free)
}

/// The size-`k` system with λ and μ pinned to concrete values; always
/// linear.
pub fn fixed_gnta_constraints(
    p: &LassoProgram,
    k: usize,
    lambdas: &[Scalar],
    mus: &[Scalar],
) -> ConstraintFormula {
    assert_eq!(lambdas.len(), k, "lambda count mismatch");
    assert_eq!(mus.len(), k.saturating_sub(1), "mu count mismatch");
    build_gnta(p, k, RayScale::Fixed { lambdas, mus })
}

/// Forces `x0 = x1` conjunct-wise; used for fixed-point queries on
/// loop-only programs, where the trivial stem would otherwise leave `x0`
/// floating.
pub(crate) fn pin_start_to_fixed_point(f: &mut ConstraintFormula, n: usize) {
    for i in 0..n {
        f.constraints.push(Constraint {
            terms: vec![
                Term { coeff: Scalar::one(), unknowns: vec![i] },
                Term { coeff: Scalar::from_int(-1), unknowns: vec![n + i] },
            ],
            rel: Rel::Eq,
            bound: Scalar::zero(),
        });
    }
}

/// Reads a certificate out of a solver model. λ and μ come from the model
/// when symbolic, or from the pinned candidate otherwise. `None` when the
/// model is missing an unknown, which signals a protocol bug upstream.
pub(crate) fn decode_certificate(
    p: &LassoProgram,
    k: usize,
    pinned: Option<(&[Scalar], &[Scalar])>,
    model: &BTreeMap<String, Scalar>,
) -> Option<GntaCertificate> {
    let n = p.dim();
    let fetch = |name: String| model.get(&name).cloned();
    let x0 = (0..n).map(|i| fetch(x0_name(i))).collect::<Option<Vec<_>>>()?;
    let x1 = (0..n).map(|i| fetch(x1_name(i))).collect::<Option<Vec<_>>>()?;
    let mut rays = Vec::with_capacity(k);
    for j in 0..k {
        let ray = (0..n).map(|i| fetch(ray_name(j, i))).collect::<Option<Vec<_>>>()?;
        rays.push(ExactVector(ray));
    }
    let (lambdas, mus) = match pinned {
        Some((l, m)) => (l.to_vec(), m.to_vec()),
        None => {
            let l = (0..k).map(|j| fetch(lambda_name(j))).collect::<Option<Vec<_>>>()?;
            let m = (0..k.saturating_sub(1))
                .map(|j| fetch(mu_name(j)))
                .collect::<Option<Vec<_>>>()?;
            (l, m)
        }
    };
    Some(GntaCertificate { x0: ExactVector(x0), x1: ExactVector(x1), rays, lambdas, mus })
}

/// Which strategies `analyze` may use.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum AnalysisMode {
    /// Everything: fixed point, nilpotent ranking, fixed-λ, nonlinear.
    #[default]
    Auto,
    /// Only the fixed-point query and the nilpotent ranking check.
    FixedPoint,
    /// Alias for the full pipeline; certificates of any size are in play.
    Gnta,
}

/// Knobs for `analyze`.
#[derive(Clone, Debug)]
pub struct SynthesisOptions {
    pub mode: AnalysisMode,
    /// Largest certificate size to try; defaults to the dimension.
    pub max_size: Option<usize>,
    /// Sort unknowns as integers and use integer logics.
    pub integer_mode: bool,
    /// Per-query wall-clock budget.
    pub timeout_ms: u64,
    /// Solver command line (path plus arguments). `None` falls back to the
    /// LASSOCERT_SMT environment variable, then to `z3` on PATH.
    pub solver: Option<String>,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            mode: AnalysisMode::Auto,
            max_size: None,
            integer_mode: false,
            timeout_ms: 12_000,
            solver: None,
        }
    }
}

/// The strategy that produced a verdict.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    FixedPoint,
    NestedRanking,
    FixedLambda,
    Nonlinear,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::FixedPoint => "fixed-point",
            Strategy::NestedRanking => "nested-ranking",
            Strategy::FixedLambda => "fixed-lambda",
            Strategy::Nonlinear => "nonlinear",
        })
    }
}

/// What the analysis concluded.
#[derive(Clone, Debug)]
pub enum AnalysisVerdict {
    Nonterminating(GntaCertificate),
    Terminating(NestedRankingWitness),
    Unknown(String),
}

impl AnalysisVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            AnalysisVerdict::Nonterminating(_) => "nonterminating",
            AnalysisVerdict::Terminating(_) => "terminating",
            AnalysisVerdict::Unknown(_) => "unknown",
        }
    }
}

/// A verdict plus how it was reached.
#[derive(Clone, Debug)]
pub struct AnalysisRun {
    pub verdict: AnalysisVerdict,
    /// The strategy that fired, absent on Unknown.
    pub strategy: Option<Strategy>,
    /// Certificate size on nonterminating verdicts.
    pub size: Option<usize>,
    pub wall_ms: u64,
    /// Total subprocess time across all queries.
    pub solver_ms: u64,
    /// One line per strategy attempt.
    pub log: Vec<String>,
}

/// Failures that are not verdicts: infrastructure trouble or internal
/// inconsistency between synthesis and validation.
#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("no usable SMT solver: {0}")]
    SolverUnavailable(String),
    #[error("internal error: synthesized certificate rejected by the validator\n{0}")]
    CertificateRejected(String),
    #[error("internal error: constructed witness rejected by the checker: {0}")]
    WitnessRejected(String),
}

/// Shared solver state across the strategies of one analysis.
struct SolverHandle {
    command: Option<SolverCommand>,
    /// Why the command is gone, when it is.
    failure: Option<String>,
    timeout_ms: u64,
    integer: bool,
    /// Some query was attempted (decides whether missing solvers matter).
    wanted: bool,
    /// Some subprocess actually ran to a classification.
    ran: bool,
    solver_ms: u64,
}

impl SolverHandle {
    fn query(
        &mut self,
        f: ConstraintFormula,
        label: &str,
        log: &mut Vec<String>,
    ) -> Option<BTreeMap<String, Scalar>> {
        self.wanted = true;
        let Some(command) = self.command.clone() else {
            log.push(format!(
                "{label}: skipped, {}",
                self.failure.as_deref().unwrap_or("solver unavailable")
            ));
            return None;
        };
        let nonlinear = f.max_degree() > 1;
        let logic = match (self.integer, nonlinear) {
            (false, false) => Logic::QfLra,
            (false, true) => Logic::QfNra,
            (true, false) => Logic::QfLia,
            (true, true) => Logic::QfNia,
        };
        let f = if self.integer { f.with_sort(Sort::Integer) } else { f };
        let cfg = SolverConfig {
            command,
            timeout_ms: self.timeout_ms,
            logic,
            random_seed: None,
        };
        let outcome = smt::solve(&f, &cfg);
        self.solver_ms += outcome.solver_ms;
        match outcome.status {
            SolveStatus::Sat => {
                self.ran = true;
                log.push(format!("{label}: sat"));
                outcome.model
            }
            SolveStatus::Unsat => {
                self.ran = true;
                log.push(format!("{label}: unsat"));
                None
            }
            SolveStatus::Unknown => {
                self.ran = true;
                log.push(format!("{label}: solver answered unknown"));
                None
            }
            SolveStatus::Timeout => {
                self.ran = true;
                log.push(format!("{label}: timeout after {} ms", self.timeout_ms));
                None
            }
            SolveStatus::ProcessError => {
                log.push(format!("{label}: solver error, {}", outcome.detail));
                if outcome.spawn_failed {
                    self.failure = Some(outcome.detail);
                    self.command = None;
                }
                None
            }
        }
    }
}

/// Size-0 search: is there a state the loop maps to itself, reachable
/// through the stem? `Ok(None)` means provably none; errors carry the
/// reason the query was inconclusive.
pub fn fixed_point(
    p: &LassoProgram,
    opts: &SynthesisOptions,
) -> Result<Option<GntaCertificate>, SolverFailure> {
    let command = smt::resolve_solver(opts.solver.as_deref())
        .map_err(|detail| SolverFailure { status: SolveStatus::ProcessError, detail })?;
    let mut f = gnta_constraints(p, 0);
    if p.stem.is_true() {
        pin_start_to_fixed_point(&mut f, p.dim());
    }
    let f = if opts.integer_mode { f.with_sort(Sort::Integer) } else { f };
    let cfg = SolverConfig {
        command,
        timeout_ms: opts.timeout_ms,
        logic: if opts.integer_mode { Logic::QfLia } else { Logic::QfLra },
        random_seed: None,
    };
    let outcome = smt::solve(&f, &cfg);
    match outcome.status {
        SolveStatus::Sat => {
            let model = outcome.model.as_ref().expect("sat outcome carries a model");
            let cert = decode_certificate(p, 0, None, model).ok_or(SolverFailure {
                status: SolveStatus::ProcessError,
                detail: "model omitted an unknown".to_string(),
            })?;
            Ok(Some(cert))
        }
        SolveStatus::Unsat => Ok(None),
        status => Err(SolverFailure { status, detail: outcome.detail }),
    }
}

/// λ/μ assignments worth trying at size `k`: every size-`k` sub-multiset
/// of the rational eigenvalue multiset, largest values first, crossed with
/// 0/1 superdiagonal patterns. Empty when the spectrum is not fully
/// rational (or `k` exceeds it).
pub fn fixed_lambda_candidates(
    d: &DeterministicUpdate,
    k: usize,
) -> Vec<(Vec<Scalar>, Vec<Scalar>)> {
    if k == 0 {
        return vec![(Vec::new(), Vec::new())];
    }
    // The superdiagonal pattern space is 2^(k-1); past that point the
    // nonlinear fallback is the only sane route.
    if k > 17 {
        return Vec::new();
    }
    let spectrum = rational_spectrum(&char_poly(&d.update_matrix));
    if !spectrum.all_roots_rational {
        return Vec::new();
    }
    let patterns = 1usize << (k - 1);
    let mut lambda_choices = Vec::new();
    pick_sub_multisets(&spectrum.rational_roots, 0, k, &mut Vec::new(), &mut lambda_choices);
    let mut out = Vec::new();
    for lambdas in lambda_choices {
        for bits in 0..patterns {
            let mus: Vec<Scalar> = (0..k - 1)
                .map(|i| {
                    if bits >> i & 1 == 1 {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    }
                })
                .collect();
            out.push((lambdas.clone(), mus));
        }
    }
    out
}

fn pick_sub_multisets(
    roots: &[(Scalar, usize)],
    idx: usize,
    remaining: usize,
    current: &mut Vec<Scalar>,
    out: &mut Vec<Vec<Scalar>>,
) {
    if remaining == 0 {
        out.push(current.clone());
        return;
    }
    if idx == roots.len() {
        return;
    }
    let (value, mult) = &roots[idx];
    let take_max = (*mult).min(remaining);
    for take in (0..=take_max).rev() {
        for _ in 0..take {
            current.push(value.clone());
        }
        pick_sub_multisets(roots, idx + 1, remaining - take, current, out);
        for _ in 0..take {
            current.pop();
        }
    }
}

/// Runs the strategy pipeline: fixed point, nilpotent ranking, fixed-λ
/// linear queries, then the full nonlinear query, sizes ascending; the
/// first conclusive answer wins. Every certificate or witness is
/// re-checked by the exact validator before it is returned; a rejection
/// there is an internal error, not a verdict.
pub fn analyze(p: &LassoProgram, opts: &SynthesisOptions) -> Result<AnalysisRun, AnalysisError> {
    let started = Instant::now();
    let n = p.dim();
    let k_max = opts.max_size.unwrap_or(n);
    let mut log: Vec<String> = Vec::new();

    let (command, failure) = match smt::resolve_solver(opts.solver.as_deref()) {
        Ok(c) => (Some(c), None),
        Err(e) => {
            log.push(format!("solver resolution failed: {e}"));
            (None, Some(e))
        }
    };
    let mut solver = SolverHandle {
        command,
        failure,
        timeout_ms: opts.timeout_ms,
        integer: opts.integer_mode,
        wanted: false,
        ran: false,
        solver_ms: 0,
    };

    let det = detect_deterministic(&p.loop_);

    let finish_nonterminating = |cert: GntaCertificate,
                                 strategy: Strategy,
                                 size: usize,
                                 solver: &SolverHandle,
                                 log: Vec<String>|
     -> Result<AnalysisRun, AnalysisError> {
        let report = validate(p, &cert);
        if !report.passed() {
            return Err(AnalysisError::CertificateRejected(report.to_string()));
        }
        Ok(AnalysisRun {
            verdict: AnalysisVerdict::Nonterminating(cert),
            strategy: Some(strategy),
            size: Some(size),
            wall_ms: started.elapsed().as_millis() as u64,
            solver_ms: solver.solver_ms,
            log,
        })
    };

    // (1) Fixed point: one linear query.
    {
        let mut f = gnta_constraints(p, 0);
        if p.stem.is_true() {
            pin_start_to_fixed_point(&mut f, n);
        }
        if let Some(model) = solver.query(f, "fixed-point", &mut log) {
            match decode_certificate(p, 0, None, &model) {
                Some(cert) => return finish_nonterminating(cert, Strategy::FixedPoint, 0, &solver, log),
                None => log.push("fixed-point: model omitted an unknown".to_string()),
            }
        }
    }

    // (2) Nilpotent-update termination check: pure algebra, no solver.
    match &det {
        Some(d) => {
            if let Some(witness) = nested_ranking_check(d) {
                validate_witness(d, &witness)
                    .map_err(|e| AnalysisError::WitnessRejected(e.to_string()))?;
                log.push("nested-ranking: terminating".to_string());
                return Ok(AnalysisRun {
                    verdict: AnalysisVerdict::Terminating(witness),
                    strategy: Some(Strategy::NestedRanking),
                    size: None,
                    wall_ms: started.elapsed().as_millis() as u64,
                    solver_ms: solver.solver_ms,
                    log,
                });
            } else if shift_nilpotence_index(&d.update_matrix).is_some() {
                log.push(
                    "nested-ranking: update is nilpotent but no guard row certifies termination"
                        .to_string(),
                );
            } else {
                log.push("nested-ranking: update is not identity plus nilpotent".to_string());
            }
        }
        None => log.push("nested-ranking: loop is not a deterministic update".to_string()),
    }

    if opts.mode != AnalysisMode::FixedPoint {
        // (3) Fixed-λ linear queries, sizes ascending.
        if let Some(d) = &det {
            let spectrum = rational_spectrum(&char_poly(&d.update_matrix));
            if spectrum.all_roots_rational && spectrum.all_nonnegative {
                for k in 1..=k_max {
                    for (lambdas, mus) in fixed_lambda_candidates(d, k) {
                        let label = format!(
                            "fixed-lambda k={k} lambda=({}) mu=({})",
                            join_scalars(&lambdas),
                            join_scalars(&mus)
                        );
                        let f = fixed_gnta_constraints(p, k, &lambdas, &mus);
                        if let Some(model) = solver.query(f, &label, &mut log) {
                            match decode_certificate(p, k, Some((&lambdas, &mus)), &model) {
                                Some(cert) => {
                                    return finish_nonterminating(
                                        cert,
                                        Strategy::FixedLambda,
                                        k,
                                        &solver,
                                        log,
                                    )
                                }
                                None => log
                                    .push(format!("{label}: model omitted an unknown")),
                            }
                        }
                    }
                }
            } else {
                log.push(
                    "fixed-lambda: skipped, spectrum is not all-rational-nonnegative".to_string(),
                );
            }
        } else {
            log.push("fixed-lambda: skipped, loop is not a deterministic update".to_string());
        }

        // (4) Full nonlinear queries, sizes ascending.
        for k in 1..=k_max {
            let label = format!("nonlinear k={k}");
            let f = gnta_constraints(p, k);
            if let Some(model) = solver.query(f, &label, &mut log) {
                match decode_certificate(p, k, None, &model) {
                    Some(cert) => {
                        return finish_nonterminating(cert, Strategy::Nonlinear, k, &solver, log)
                    }
                    None => log.push(format!("{label}: model omitted an unknown")),
                }
            }
        }
    }

    if solver.wanted && !solver.ran {
        if let Some(failure) = solver.failure {
            return Err(AnalysisError::SolverUnavailable(failure));
        }
    }

    Ok(AnalysisRun {
        verdict: AnalysisVerdict::Unknown(log.join("; ")),
        strategy: None,
        size: None,
        wall_ms: started.elapsed().as_millis() as u64,
        solver_ms: solver.solver_ms,
        log,
    })
}

fn join_scalars(values: &[Scalar]) -> String {
    values.iter().map(Scalar::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_lasso;

    const FIG1C: &str =
        "vars: a b;\nstem: a' = a && b' = 1;\nloop: a + b >= 4 && a' = 3*a + b && b' = 2*b;\n";

    fn fig1c_values(lam0: i64) -> Vec<Scalar> {
        // Order: x0, x1, y0, y1, lam0, lam1, mu0.
        [3, 0, 3, 1, 4, 0, 3, 1]
            .iter()
            .map(|&v| Scalar::from_int(v))
            .chain([Scalar::from_int(lam0), Scalar::from_int(2), Scalar::one()])
            .collect()
    }

    #[test]
    fn full_formula_has_the_documented_shape() {
        let p = parse_lasso(FIG1C).unwrap();
        let f = gnta_constraints(&p, 2);
        assert_eq!(f.unknowns.len(), 11);
        let names: Vec<&str> = f.unknowns.iter().map(|u| u.name.as_str()).collect();
        assert_eq!(
            names,
            ["x0_0", "x0_1", "x1_0", "x1_1", "y0_0", "y0_1", "y1_0", "y1_1", "lam0", "lam1", "mu0"]
        );
        // 3 domain + 4 stem + 5 point + 10 ray conjuncts.
        assert_eq!(f.constraints.len(), 22);
        assert_eq!(f.max_degree(), 2);
    }

    #[test]
    fn golden_certificate_satisfies_the_encoding() {
        let p = parse_lasso(FIG1C).unwrap();
        let f = gnta_constraints(&p, 2);
        assert!(f.satisfied_by(&fig1c_values(3)));
        assert!(!f.satisfied_by(&fig1c_values(2)));
    }

    #[test]
    fn pinned_lambdas_linearize_the_encoding() {
        let p = parse_lasso(FIG1C).unwrap();
        let lambdas = [Scalar::from_int(3), Scalar::from_int(2)];
        let mus = [Scalar::one()];
        let f = fixed_gnta_constraints(&p, 2, &lambdas, &mus);
        assert_eq!(f.max_degree(), 1);
        let values: Vec<Scalar> =
            [3, 0, 3, 1, 4, 0, 3, 1].iter().map(|&v| Scalar::from_int(v)).collect();
        assert!(f.satisfied_by(&values));
    }

    #[test]
    fn growth_loop_admits_a_unit_ray() {
        // x0 = x1 = 0, y = 1, lambda = 1 satisfies the size-1 system.
        let p = parse_lasso("vars: x; loop: x >= 0 && x' = x + 1;").unwrap();
        let f = gnta_constraints(&p, 1);
        let values: Vec<Scalar> =
            [0, 0, 1, 1].iter().map(|&v| Scalar::from_int(v)).collect();
        assert!(f.satisfied_by(&values));
    }

    #[test]
    fn fixed_point_pin_forces_equal_endpoints() {
        let p = parse_lasso("vars: x; loop: x >= 0 && x' = x;").unwrap();
        let mut f = gnta_constraints(&p, 0);
        pin_start_to_fixed_point(&mut f, 1);
        let same: Vec<Scalar> = vec![Scalar::from_int(5), Scalar::from_int(5)];
        let differ: Vec<Scalar> = vec![Scalar::from_int(4), Scalar::from_int(5)];
        assert!(f.satisfied_by(&same));
        assert!(!f.satisfied_by(&differ));
    }

    fn update_of(src: &str) -> DeterministicUpdate {
        let p = parse_lasso(src).unwrap();
        detect_deterministic(&p.loop_).expect("deterministic loop")
    }

    #[test]
    fn candidates_draw_eigenvalues_largest_first() {
        let d = update_of(
            "vars: a b; loop: a + b >= 3 && a' = 3*a - 2 && b' = 2*b;",
        );
        let k1 = fixed_lambda_candidates(&d, 1);
        assert_eq!(
            k1,
            vec![
                (vec![Scalar::from_int(3)], vec![]),
                (vec![Scalar::from_int(2)], vec![]),
            ]
        );
        let k2 = fixed_lambda_candidates(&d, 2);
        assert_eq!(
            k2,
            vec![
                (vec![Scalar::from_int(3), Scalar::from_int(2)], vec![Scalar::zero()]),
                (vec![Scalar::from_int(3), Scalar::from_int(2)], vec![Scalar::one()]),
            ]
        );
    }

    #[test]
    fn candidates_respect_multiplicities() {
        let d = update_of("vars: x y; loop: x >= 0 && x' = x + y && y' = y - 1;");
        assert_eq!(
            shift_nilpotence_index(&d.update_matrix),
            Some(2),
            "sanity: unit spectrum"
        );
        let k2 = fixed_lambda_candidates(&d, 2);
        assert_eq!(
            k2,
            vec![
                (vec![Scalar::one(), Scalar::one()], vec![Scalar::zero()]),
                (vec![Scalar::one(), Scalar::one()], vec![Scalar::one()]),
            ]
        );
        assert!(fixed_lambda_candidates(&d, 3).is_empty());
    }

    #[test]
    fn irrational_spectra_yield_no_candidates() {
        // Update (x, y) -> (2y, x): eigenvalues ±√2.
        let d = update_of("vars: x y; loop: x >= 0 && x' = 2*y && y' = x;");
        let poly = char_poly(&d.update_matrix);
        assert_eq!(
            poly.coeffs,
            vec![Scalar::from_int(-2), Scalar::zero(), Scalar::one()]
        );
        assert!(fixed_lambda_candidates(&d, 1).is_empty());
    }

    #[test]
    fn decoded_certificates_read_back_every_slot() {
        let p = parse_lasso(FIG1C).unwrap();
        let mut model = BTreeMap::new();
        for (name, value) in [
            ("x0_0", 3),
            ("x0_1", 0),
            ("x1_0", 3),
            ("x1_1", 1),
            ("y0_0", 4),
            ("y0_1", 0),
            ("y1_0", 3),
            ("y1_1", 1),
            ("lam0", 3),
            ("lam1", 2),
            ("mu0", 1),
        ] {
            model.insert(name.to_string(), Scalar::from_int(value));
        }
        let cert = decode_certificate(&p, 2, None, &model).unwrap();
        assert!(validate(&p, &cert).passed());
        model.remove("mu0");
        assert!(decode_certificate(&p, 2, None, &model).is_none());
    }

    #[test]
    fn integer_sorting_touches_every_unknown() {
        let p = parse_lasso(FIG1C).unwrap();
        let f = gnta_constraints(&p, 1).with_sort(Sort::Integer);
        assert!(f.unknowns.iter().all(|u| u.sort == Sort::Integer));
    }
}
