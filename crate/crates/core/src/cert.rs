//! Geometric nontermination certificates.
//!
//! A certificate `(x0, x1, y1..yk, λ1..λk, μ1..μ(k-1))` claims the program
//! has an infinite run whose states are partial sums of geometric series:
//! after the stem step `x0 → x1`, state t is `x1 + Σ_{j=0..t-2} Y·U^j·1`,
//! where `Y` has the rays as columns and `U` is upper bidiagonal with the
//! λ on the diagonal and the μ on the superdiagonal.
//!
//! `validate` checks the defining conditions with exact arithmetic and
//! reports per-row residuals; `unroll` materializes the run iteratively;
//! `closed_form_state` computes a single state directly, through a
//! noncommutative expansion of `U^j` (complete homogeneous symmetric
//! polynomials in the λ), so the two can cross-check each other.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{ExactMatrix, ExactVector};
use crate::model::LassoProgram;
use crate::scalar::Scalar;

/// A geometric nontermination argument of size `k = rays.len()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GntaCertificate {
    pub x0: ExactVector,
    pub x1: ExactVector,
    pub rays: Vec<ExactVector>,
    pub lambdas: Vec<Scalar>,
    pub mus: Vec<Scalar>,
}

impl GntaCertificate {
    /// A size-0 certificate for a fixed point: `x0 = x1 = x*` unless a
    /// distinct stem start is supplied.
    pub fn fixed_point(x0: ExactVector, x1: ExactVector) -> Self {
        GntaCertificate { x0, x1, rays: Vec::new(), lambdas: Vec::new(), mus: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.rays.len()
    }

    pub fn dim(&self) -> usize {
        self.x1.dim()
    }

    /// The point the loop must map `x1` to: `x1 + Σ yi`.
    pub fn point_target(&self) -> ExactVector {
        let mut target = self.x1.clone();
        for ray in &self.rays {
            target = target.add(ray);
        }
        target
    }
}

/// The upper bidiagonal matrix driving ray evolution: λ on the diagonal,
/// μ on the superdiagonal, zero elsewhere.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UMatrix(pub ExactMatrix);

/// Builds the `k × k` ray-evolution matrix.
/// Panics when `|mus| != max(|lambdas| - 1, 0)` or any entry is negative.
pub fn build_u(lambdas: &[Scalar], mus: &[Scalar]) -> UMatrix {
    let k = lambdas.len();
    assert_eq!(
        mus.len(),
        k.saturating_sub(1),
        "need exactly max(k - 1, 0) superdiagonal entries"
    );
    assert!(
        lambdas.iter().chain(mus.iter()).all(|e| !e.is_negative()),
        "negative entry"
    );
    let mut m = ExactMatrix::zeros(k, k);
    for (i, l) in lambdas.iter().enumerate() {
        m[(i, i)] = l.clone();
    }
    for (i, u) in mus.iter().enumerate() {
        m[(i, i + 1)] = u.clone();
    }
    UMatrix(m)
}

/// One of the defining conditions of a certificate. Ray indices are
/// 1-based, matching the subscripts in `(ray)_i`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Condition {
    Domain,
    Initiation,
    Point,
    Ray(usize),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Domain => write!(f, "(domain)"),
            Condition::Initiation => write!(f, "(initiation)"),
            Condition::Point => write!(f, "(point)"),
            Condition::Ray(i) => write!(f, "(ray)_{i}"),
        }
    }
}

/// A violated row: which row failed and by how much (`lhs - bound`;
/// for `(domain)` the residual is the offending entry itself).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub row: usize,
    pub residual: Scalar,
}

/// Outcome for a single condition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConditionResult {
    pub condition: Condition,
    pub violations: Vec<Violation>,
}

impl ConditionResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Full per-condition validation outcome.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(ConditionResult::passed)
    }

    /// The first failed condition, for terse error messages.
    pub fn first_failure(&self) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| !c.passed())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cond in &self.conditions {
            if cond.passed() {
                writeln!(f, "{}: ok", cond.condition)?;
            } else {
                for v in &cond.violations {
                    writeln!(
                        f,
                        "{}: violated at row {} (residual {})",
                        cond.condition, v.row, v.residual
                    )?;
                }
            }
        }
        Ok(())
    }
}

/// Checks the (domain), (initiation), (point), and (ray) conditions with
/// exact arithmetic. A failed condition is a report entry, not an error;
/// only dimension mismatches panic.
pub fn validate(p: &LassoProgram, c: &GntaCertificate) -> ValidationReport {
    let n = p.dim();
    assert_eq!(c.x0.dim(), n, "x0 dimension mismatch");
    assert_eq!(c.x1.dim(), n, "x1 dimension mismatch");
    for ray in &c.rays {
        assert_eq!(ray.dim(), n, "ray dimension mismatch");
    }
    let k = c.size();
    assert_eq!(c.lambdas.len(), k, "lambda count mismatch");
    assert_eq!(c.mus.len(), k.saturating_sub(1), "mu count mismatch");

    let mut conditions = Vec::new();

    // (domain): all λ and μ nonnegative. Violation rows index the λ list
    // first, then the μ list.
    let mut domain = ConditionResult { condition: Condition::Domain, violations: Vec::new() };
    for (i, l) in c.lambdas.iter().enumerate() {
        if l.is_negative() {
            domain.violations.push(Violation { row: i, residual: l.clone() });
        }
    }
    for (i, m) in c.mus.iter().enumerate() {
        if m.is_negative() {
            domain.violations.push(Violation { row: k + i, residual: m.clone() });
        }
    }
    conditions.push(domain);

    // (initiation): (x0, x1) in the stem relation.
    let mut initiation =
        ConditionResult { condition: Condition::Initiation, violations: Vec::new() };
    for (i, row) in p.stem.rows.iter().enumerate() {
        if !row.satisfied(&c.x0, &c.x1) {
            initiation.violations.push(Violation {
                row: i,
                residual: row.lhs(&c.x0, &c.x1) - row.bound.clone(),
            });
        }
    }
    conditions.push(initiation);

    // (point): the loop maps x1 to x1 + Σ yi, strict rows strictly.
    let target = c.point_target();
    let mut point = ConditionResult { condition: Condition::Point, violations: Vec::new() };
    for (i, row) in p.loop_.rows.iter().enumerate() {
        if !row.satisfied(&c.x1, &target) {
            point.violations.push(Violation {
                row: i,
                residual: row.lhs(&c.x1, &target) - row.bound.clone(),
            });
        }
    }
    conditions.push(point);

    // (ray)_i: the coefficient part applied to (yi, λi·yi + μ(i-1)·y(i-1))
    // is <= 0, non-strict even for strict rows, since rays are directions,
    // not states.
    for i in 0..k {
        let y = &c.rays[i];
        let mut yp = y.scale(&c.lambdas[i]);
        if i > 0 {
            yp = yp.add(&c.rays[i - 1].scale(&c.mus[i - 1]));
        }
        let mut ray = ConditionResult { condition: Condition::Ray(i + 1), violations: Vec::new() };
        for (r, row) in p.loop_.rows.iter().enumerate() {
            let lhs = row.lhs(y, &yp);
            if lhs.is_positive() {
                ray.violations.push(Violation { row: r, residual: lhs });
            }
        }
        conditions.push(ray);
    }

    ValidationReport { conditions }
}

/// Materializes the first `steps` states of the certified run:
/// `x0, x1, x1 + Y·1, x1 + Y·1 + Y·U·1, …`.
pub fn unroll(p: &LassoProgram, c: &GntaCertificate, steps: usize) -> Vec<ExactVector> {
    assert_eq!(c.dim(), p.dim(), "certificate dimension mismatch");
    let mut states = Vec::with_capacity(steps);
    if steps == 0 {
        return states;
    }
    states.push(c.x0.clone());
    if steps == 1 {
        return states;
    }
    states.push(c.x1.clone());
    if c.size() == 0 {
        states.resize(steps, c.x1.clone());
        return states;
    }
    let u = build_u(&c.lambdas, &c.mus).0;
    let y = ExactMatrix::from_columns(&c.rays);
    let mut weights = ExactVector::ones(c.size());
    let mut state = c.x1.clone();
    for _ in 2..steps {
        state = state.add(&y.matvec(&weights));
        states.push(state.clone());
        weights = u.matvec(&weights);
    }
    states
}

/// State `t` of the certified run (`t >= 1`, `state_1 = x1`), computed in
/// closed form rather than by iterating the run.
///
/// `U = D + N` with diagonal `D` and superdiagonal `N` do not commute, so
/// the binomial expansion of `U^j` picks up one term per interleaving;
/// grouped by the number of superdiagonal steps this is
/// `(U^j)_{p,q} = (Π_{l=p..q-1} μ_l) · h_{j-(q-p)}(λ_p, …, λ_q)`
/// with `h_d` the complete homogeneous symmetric polynomial. For equal λ
/// it collapses to the familiar `C(j, q-p)·λ^(j-q+p)·Πμ`.
pub fn closed_form_state(c: &GntaCertificate, t: usize) -> ExactVector {
    assert!(t >= 1, "states are numbered from 1");
    let k = c.size();
    let mut state = c.x1.clone();
    if t < 2 || k == 0 {
        return state;
    }
    let y = ExactMatrix::from_columns(&c.rays);
    // weights[q] = Σ_{j=0..t-2} Σ_p (U^j)_{p,q} … transposed below: we
    // need Σ_j U^j · 1, whose p-th entry sums (U^j)_{p,q} over q >= p.
    let mut summed = ExactVector::zeros(k);
    for p in 0..k {
        let mut total = Scalar::zero();
        for q in p..k {
            let mut mu_product = Scalar::one();
            for l in p..q {
                mu_product *= c.mus[l].clone();
            }
            if mu_product.is_zero() {
                continue;
            }
            let d = q - p;
            let lams = &c.lambdas[p..=q];
            for j in 0..=(t - 2) {
                if j < d {
                    continue;
                }
                total += &mu_product * &homogeneous_sum(j - d, lams);
            }
        }
        summed[p] = total;
    }
    state = state.add(&y.matvec(&summed));
    state
}

/// Complete homogeneous symmetric polynomial `h_degree` evaluated at the
/// given values, by the prefix recurrence
/// `h_d(x_1..x_r) = h_d(x_1..x_{r-1}) + x_r·h_{d-1}(x_1..x_r)`.
fn homogeneous_sum(degree: usize, values: &[Scalar]) -> Scalar {
    if degree == 0 {
        return Scalar::one();
    }
    if values.is_empty() {
        return Scalar::zero();
    }
    // by_degree[d] holds h_d over the prefix processed so far.
    let mut by_degree = vec![Scalar::zero(); degree + 1];
    by_degree[0] = Scalar::one();
    for x in values {
        for d in 1..=degree {
            let carry = x * &by_degree[d - 1];
            by_degree[d] += carry;
        }
    }
    by_degree[degree].clone()
}

/// Schema of the certificate file: rationals as strings, rays listed
/// ray-by-ray.
#[derive(Serialize, Deserialize)]
struct GntaDocument {
    kind: String,
    vars: Vec<String>,
    x0: Vec<Scalar>,
    x1: Vec<Scalar>,
    rays: Vec<Vec<Scalar>>,
    lambda: Vec<Scalar>,
    mu: Vec<Scalar>,
}

/// Malformed or inconsistent certificate document.
#[derive(Debug, thiserror::Error)]
pub enum CertFormatError {
    #[error("malformed certificate document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("certificate document is inconsistent: {0}")]
    Inconsistent(String),
}

/// Renders a certificate as its JSON document.
pub fn serialize(c: &GntaCertificate, vars: &[String]) -> String {
    assert_eq!(vars.len(), c.dim(), "variable list dimension mismatch");
    let doc = GntaDocument {
        kind: "gnta".to_string(),
        vars: vars.to_vec(),
        x0: c.x0.iter().cloned().collect(),
        x1: c.x1.iter().cloned().collect(),
        rays: c.rays.iter().map(|r| r.iter().cloned().collect()).collect(),
        lambda: c.lambdas.clone(),
        mu: c.mus.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("certificate serialization");
    text.push('\n');
    text
}

/// Parses a certificate document and checks its internal dimensions.
pub fn deserialize(text: &str) -> Result<(GntaCertificate, Vec<String>), CertFormatError> {
    let doc: GntaDocument = serde_json::from_str(text)?;
    let fail = |msg: String| Err(CertFormatError::Inconsistent(msg));
    if doc.kind != "gnta" {
        return fail(format!("kind is `{}`, expected `gnta`", doc.kind));
    }
    let n = doc.vars.len();
    if n == 0 {
        return fail("empty variable list".to_string());
    }
    if doc.x0.len() != n || doc.x1.len() != n {
        return fail(format!(
            "x0/x1 have lengths {}/{}, expected {n}",
            doc.x0.len(),
            doc.x1.len()
        ));
    }
    for (i, ray) in doc.rays.iter().enumerate() {
        if ray.len() != n {
            return fail(format!("ray {i} has length {}, expected {n}", ray.len()));
        }
    }
    let k = doc.rays.len();
    if doc.lambda.len() != k {
        return fail(format!("{} lambdas for {k} rays", doc.lambda.len()));
    }
    if doc.mu.len() != k.saturating_sub(1) {
        return fail(format!("{} mus for {k} rays, expected {}", doc.mu.len(), k.saturating_sub(1)));
    }
    Ok((
        GntaCertificate {
            x0: ExactVector(doc.x0),
            x1: ExactVector(doc.x1),
            rays: doc.rays.into_iter().map(ExactVector).collect(),
            lambdas: doc.lambda,
            mus: doc.mu,
        },
        doc.vars,
    ))
}
