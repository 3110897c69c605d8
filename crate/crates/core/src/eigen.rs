//! Exact spectral analysis of deterministic updates, and the termination
//! check for updates of the form `x' = (I + N)x + m` with nilpotent `N`.
//!
//! Everything here is exact rational arithmetic: the characteristic
//! polynomial comes from the Faddeev-LeVerrier recurrence, eigenvalues from
//! the rational root theorem with synthetic-division deflation, and the
//! termination witness is checked through affine-function identities rather
//! than quantifier reasoning.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{ExactMatrix, ExactVector};
use crate::model::DeterministicUpdate;
use crate::scalar::Scalar;

/// Monic polynomial `det(λI - M)`; `coeffs[i]` multiplies `λ^i`, so the
/// list has length `n + 1` with a leading 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharPoly {
    pub coeffs: Vec<Scalar>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        eval_poly(&self.coeffs, x)
    }
}

/// Characteristic polynomial of a square matrix by the Faddeev-LeVerrier
/// recurrence: `M_1 = M`, `c_{n-1} = -tr(M_1)`, then
/// `M_k = M (M_{k-1} + c_{n-k+1} I)` and `c_{n-k} = -tr(M_k)/k`.
pub fn char_poly(m: &ExactMatrix) -> CharPoly {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.rows();
    let mut coeffs = vec![Scalar::zero(); n + 1];
    coeffs[n] = Scalar::one();
    if n == 0 {
        return CharPoly { coeffs };
    }
    let mut power = m.clone();
    coeffs[n - 1] = -power.trace();
    for k in 2..=n {
        let shifted = power.add(&ExactMatrix::identity(n).scale(&coeffs[n - k + 1]));
        power = m.matmul(&shifted);
        coeffs[n - k] = -(power.trace() / Scalar::from_int(k as i64));
    }
    CharPoly { coeffs }
}

/// The rational part of a spectrum: which roots of the characteristic
/// polynomial are rational, with multiplicities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpectrumReport {
    /// Rational roots with multiplicities, sorted in decreasing order.
    pub rational_roots: Vec<(Scalar, usize)>,
    /// True when the multiplicities sum to the full degree.
    pub all_roots_rational: bool,
    /// True when every found rational root is >= 0. Only meaningful
    /// together with `all_roots_rational`.
    pub all_nonnegative: bool,
}

impl SpectrumReport {
    /// The roots as a flat multiset, still in decreasing order.
    pub fn multiset(&self) -> Vec<Scalar> {
        let mut out = Vec::new();
        for (root, mult) in &self.rational_roots {
            for _ in 0..*mult {
                out.push(root.clone());
            }
        }
        out
    }
}

/// Finds every rational root of a monic polynomial: zero roots are read
/// off the trailing coefficients, the rest come from rational-root-theorem
/// candidates over the denominator-cleared polynomial, each deflated out by
/// synthetic division until it stops dividing.
pub fn rational_spectrum(p: &CharPoly) -> SpectrumReport {
    let degree = p.degree();
    let mut remaining = p.coeffs.clone();
    let mut roots: Vec<(Scalar, usize)> = Vec::new();

    let mut zero_mult = 0usize;
    while remaining.len() > 1 && remaining[0].is_zero() {
        remaining.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Scalar::zero(), zero_mult));
    }

    'search: while remaining.len() > 1 {
        let ints = cleared_coefficients(&remaining);
        let lead = ints.last().unwrap().abs();
        let constant = ints.first().unwrap().abs();
        for p_num in divisors(&constant) {
            for q_den in divisors(&lead) {
                if p_num.gcd(&q_den) != BigInt::one() {
                    continue;
                }
                for sign in [1i64, -1] {
                    let candidate =
                        Scalar::from_big(&p_num * BigInt::from(sign), q_den.clone());
                    let mut mult = 0usize;
                    while eval_poly(&remaining, &candidate).is_zero() {
                        remaining = deflate(&remaining, &candidate);
                        mult += 1;
                    }
                    if mult > 0 {
                        roots.push((candidate, mult));
                        continue 'search;
                    }
                }
            }
        }
        break;
    }

    let found: usize = roots.iter().map(|(_, m)| m).sum();
    roots.sort_by(|a, b| b.0.cmp(&a.0));
    SpectrumReport {
        all_roots_rational: found == degree,
        all_nonnegative: roots.iter().all(|(r, _)| !r.is_negative()),
        rational_roots: roots,
    }
}

/// Scales rational coefficients by the lcm of their denominators.
fn cleared_coefficients(coeffs: &[Scalar]) -> Vec<BigInt> {
    let mut scale = BigInt::one();
    for c in coeffs {
        scale = scale.lcm(c.denom());
    }
    coeffs
        .iter()
        .map(|c| c.numer() * (&scale / c.denom()))
        .collect()
}

/// Positive divisors by trial division.
fn divisors(x: &BigInt) -> Vec<BigInt> {
    assert!(x.is_positive(), "divisors of a nonpositive value");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *x {
        if (x % &d).is_zero() {
            small.push(d.clone());
            let paired = x / &d;
            if paired != d {
                large.push(paired);
            }
        }
        d += BigInt::one();
    }
    small.extend(large.into_iter().rev());
    small
}

fn eval_poly(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// Synthetic division by `(λ - root)`; the caller guarantees `root` is a
/// root, so the remainder is dropped.
fn deflate(coeffs: &[Scalar], root: &Scalar) -> Vec<Scalar> {
    let n = coeffs.len() - 1;
    let mut quotient = vec![Scalar::zero(); n];
    let mut carry = Scalar::zero();
    for i in (0..n).rev() {
        carry = coeffs[i + 1].clone() + root * &carry;
        quotient[i] = carry.clone();
    }
    quotient
}

/// Nilpotence index of `N = M - I`: the smallest `i >= 1` with `N^i = 0`,
/// absent when no such `i <= n` exists.
pub fn shift_nilpotence_index(m: &ExactMatrix) -> Option<usize> {
    assert!(m.is_square(), "nilpotence of a non-square matrix");
    let n = m.rows();
    let shifted = m.sub(&ExactMatrix::identity(n));
    let mut power = ExactMatrix::identity(n);
    for i in 1..=n.max(1) {
        power = power.matmul(&shifted);
        if power.is_zero() {
            return Some(i);
        }
    }
    None
}

/// An affine map `x ↦ coeffs·x + constant`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AffineFunction {
    pub coeffs: Vec<Scalar>,
    pub constant: Scalar,
}

impl AffineFunction {
    pub fn eval(&self, x: &ExactVector) -> Scalar {
        ExactVector(self.coeffs.clone()).dot(x) + self.constant.clone()
    }

    /// The composition `x ↦ self(Mx + m)`, again affine.
    fn after_update(&self, matrix: &ExactMatrix, offset: &ExactVector) -> AffineFunction {
        let coeffs = ExactVector(self.coeffs.clone());
        AffineFunction {
            coeffs: matrix.vecmat(&coeffs).0,
            constant: coeffs.dot(offset) + self.constant.clone(),
        }
    }
}

/// Termination witness for a nilpotent update: affine functions
/// `f_1 .. f_k` where `f_1` drops by `delta` every iteration, each later
/// `f_j` is bounded through its predecessor, and `f_k` is positive on the
/// selected guard row. No infinite run can satisfy all of that at once.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NestedRankingWitness {
    /// Index of the guard row supplying `h` (coefficients) and `h0` (bound).
    pub guard_row: usize,
    /// Claimed nilpotence index of `M - I`.
    pub nilpotence_index: usize,
    /// Exact per-iteration decrease of `f_1`.
    pub delta: Scalar,
    /// `f_j` for `j = 1..k`, in order.
    pub functions: Vec<AffineFunction>,
}

/// Checks whether the update matrix is `I + N` with `N` nilpotent of index
/// `k` and the guard sees a positive entry of `G·N^(k-1)·m`; if so the loop
/// terminates and the witness is constructed explicitly. The smallest
/// qualifying guard row is chosen, so results are reproducible.
pub fn nested_ranking_check(d: &DeterministicUpdate) -> Option<NestedRankingWitness> {
    let n = d.dim();
    let k = shift_nilpotence_index(&d.update_matrix)?;
    let shifted = d.update_matrix.sub(&ExactMatrix::identity(n));
    let pushed = shifted.pow((k - 1) as u32).matvec(&d.update_offset);
    let image = d.guard_coeffs.matvec(&pushed);
    let guard_row = image.iter().position(Scalar::is_positive)?;
    let h = d.guard_coeffs.row(guard_row);
    let h0 = d.guard_bounds[guard_row].clone();
    let delta = image[guard_row].clone();

    let mut functions = Vec::with_capacity(k);
    for j in 1..=k {
        let coeffs = shifted.pow((k - j) as u32).vecmat(&h).scale(&Scalar::from_int(-1));
        let constant = if j == k {
            h0.clone() + Scalar::one()
        } else {
            // c_j pairs with f_(j+1): c_j = -h'N^(k-j-1)m - 1.
            -h.dot(&shifted.pow((k - j - 1) as u32).matvec(&d.update_offset)) - Scalar::one()
        };
        functions.push(AffineFunction { coeffs: coeffs.0, constant });
    }

    Some(NestedRankingWitness { guard_row, nilpotence_index: k, delta, functions })
}

/// A witness identity that failed to check out.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum WitnessDefect {
    #[error("guard row {0} out of range")]
    GuardRowOutOfRange(usize),
    #[error("witness has {got} functions for claimed nesting depth {claimed}")]
    FunctionCountMismatch { claimed: usize, got: usize },
    #[error("update matrix minus identity is not nilpotent at index {0}")]
    NotNilpotentAtClaimedIndex(usize),
    #[error("decrease amount {0} is not positive")]
    DecreaseNotPositive(Scalar),
    #[error("decrease amount {got} differs from the derived value {expected}")]
    DecreaseMismatch { got: Scalar, expected: Scalar },
    #[error("coefficients of f_{0} are not -h'N^(k-{0})")]
    CoefficientMismatch(usize),
    #[error("constant of f_{0} breaks the construction")]
    ConstantMismatch(usize),
    #[error("f_1 does not decrease by delta under the update")]
    DecreaseIdentityBroken,
    #[error("f_{0} does not reduce to f_{0} plus f_{1} under the update", .j, .j - 1)]
    NestingIdentityBroken { j: usize },
}

/// Verifies a witness symbolically: nilpotence, the derived decrease, the
/// construction of every `f_j`, and the affine composition identities.
/// All checks are exact matrix algebra; no search and no solver.
pub fn validate_witness(
    d: &DeterministicUpdate,
    w: &NestedRankingWitness,
) -> Result<(), WitnessDefect> {
    let n = d.dim();
    let k = w.nilpotence_index;
    if w.guard_row >= d.guard_coeffs.rows() {
        return Err(WitnessDefect::GuardRowOutOfRange(w.guard_row));
    }
    if k == 0 || w.functions.len() != k {
        return Err(WitnessDefect::FunctionCountMismatch { claimed: k, got: w.functions.len() });
    }

    let shifted = d.update_matrix.sub(&ExactMatrix::identity(n));
    if !shifted.pow(k as u32).is_zero() {
        return Err(WitnessDefect::NotNilpotentAtClaimedIndex(k));
    }

    let h = d.guard_coeffs.row(w.guard_row);
    let h0 = d.guard_bounds[w.guard_row].clone();
    let derived_delta = h.dot(&shifted.pow((k - 1) as u32).matvec(&d.update_offset));
    if !w.delta.is_positive() {
        return Err(WitnessDefect::DecreaseNotPositive(w.delta.clone()));
    }
    if w.delta != derived_delta {
        return Err(WitnessDefect::DecreaseMismatch {
            got: w.delta.clone(),
            expected: derived_delta,
        });
    }

    let pushed_offset =
        |power: usize| -> Scalar { h.dot(&shifted.pow(power as u32).matvec(&d.update_offset)) };
    for j in 1..=k {
        let f = &w.functions[j - 1];
        let expected =
            shifted.pow((k - j) as u32).vecmat(&h).scale(&Scalar::from_int(-1));
        if ExactVector(f.coeffs.clone()) != expected {
            return Err(WitnessDefect::CoefficientMismatch(j));
        }
        let expected_constant = if j == k {
            h0.clone() + Scalar::one()
        } else {
            -pushed_offset(k - j - 1) - Scalar::one()
        };
        if f.constant != expected_constant {
            return Err(WitnessDefect::ConstantMismatch(j));
        }
    }

    // f_1(Mx + m) = f_1(x) - delta, exactly: the h'N^k term vanishes.
    let composed = w.functions[0].after_update(&d.update_matrix, &d.update_offset);
    let dropped = AffineFunction {
        coeffs: w.functions[0].coeffs.clone(),
        constant: w.functions[0].constant.clone() - w.delta.clone(),
    };
    if composed != dropped {
        return Err(WitnessDefect::DecreaseIdentityBroken);
    }

    // f_j(Mx + m) = f_j(x) + f_(j-1)(x) - h'N^(k-j)m - c_(j-1) for j > 1.
    for j in 2..=k {
        let composed = w.functions[j - 1].after_update(&d.update_matrix, &d.update_offset);
        let prev = &w.functions[j - 2];
        let f = &w.functions[j - 1];
        // The c_(j-1) from f_(j-1) cancels against the -c_(j-1) term, so
        // only the offset image remains on the constant side.
        let combined = AffineFunction {
            coeffs: ExactVector(f.coeffs.clone()).add(&ExactVector(prev.coeffs.clone())).0,
            constant: f.constant.clone() - pushed_offset(k - j),
        };
        if composed != combined {
            return Err(WitnessDefect::NestingIdentityBroken { j });
        }
    }

    Ok(())
}

/// Schema of the witness file: rationals as strings.
#[derive(Serialize, Deserialize)]
struct WitnessDocument {
    kind: String,
    vars: Vec<String>,
    guard_row: usize,
    nilpotence_index: usize,
    delta: Scalar,
    functions: Vec<AffineFunction>,
}

/// Renders a witness as its JSON document.
pub fn serialize_witness(w: &NestedRankingWitness, vars: &[String]) -> String {
    let doc = WitnessDocument {
        kind: "nested-ranking".to_string(),
        vars: vars.to_vec(),
        guard_row: w.guard_row,
        nilpotence_index: w.nilpotence_index,
        delta: w.delta.clone(),
        functions: w.functions.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("witness serialization");
    text.push('\n');
    text
}

/// Parses a witness document and checks its internal dimensions.
pub fn deserialize_witness(
    text: &str,
) -> Result<(NestedRankingWitness, Vec<String>), crate::cert::CertFormatError> {
    use crate::cert::CertFormatError;
    let doc: WitnessDocument = serde_json::from_str(text)?;
    if doc.kind != "nested-ranking" {
        return Err(CertFormatError::Inconsistent(format!(
            "kind is `{}`, expected `nested-ranking`",
            doc.kind
        )));
    }
    let n = doc.vars.len();
    if n == 0 {
        return Err(CertFormatError::Inconsistent("empty variable list".to_string()));
    }
    if doc.functions.len() != doc.nilpotence_index || doc.functions.is_empty() {
        return Err(CertFormatError::Inconsistent(format!(
            "{} functions for nesting depth {}",
            doc.functions.len(),
            doc.nilpotence_index
        )));
    }
    for (i, f) in doc.functions.iter().enumerate() {
        if f.coeffs.len() != n {
            return Err(CertFormatError::Inconsistent(format!(
                "function {} has {} coefficients, expected {n}",
                i + 1,
                f.coeffs.len()
            )));
        }
    }
    Ok((
        NestedRankingWitness {
            guard_row: doc.guard_row,
            nilpotence_index: doc.nilpotence_index,
            delta: doc.delta,
            functions: doc.functions,
        },
        doc.vars,
    ))
}
