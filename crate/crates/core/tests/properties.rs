//! Randomized cross-checks between independent routes through the core:
//! the characteristic polynomial against a cofactor-expansion determinant,
//! the closed-form state formula against step-by-step iteration, the
//! constraint encoder against the certificate validator, and the solver
//! backend's model gate against exact re-evaluation. Seeds are fixed so a
//! failure reproduces.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lassocert::cert::{closed_form_state, unroll, validate, GntaCertificate};
use lassocert::eigen::{char_poly, rational_spectrum};
use lassocert::linalg::{ExactMatrix, ExactVector};
use lassocert::model::{holds, parse_lasso, ConstraintRow, LassoProgram, Transition};
use lassocert::scalar::Scalar;
use lassocert::smt::{solve, Logic, SolveStatus, SolverCommand, SolverConfig};
use lassocert::synthesis::gnta_constraints;

// ---------------------------------------------------------------------------
// Characteristic polynomial vs. cofactor-expansion determinant.
//
// The production code computes coefficients through the trace recurrence;
// the oracle below expands det(x·I - M) symbolically, sharing nothing with
// it but the matrix type.

type Poly = Vec<Scalar>;

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Scalar::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c.clone();
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c.clone();
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Scalar::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca.clone() * cb.clone();
        }
    }
    out
}

fn poly_neg(a: &Poly) -> Poly {
    a.iter().map(|c| -c.clone()).collect()
}

fn minor(m: &[Vec<Poly>], skip_col: usize) -> Vec<Vec<Poly>> {
    m[1..]
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(j, _)| *j != skip_col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

fn det_poly(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => vec![Scalar::one()],
        1 => m[0][0].clone(),
        _ => {
            let mut acc: Poly = Vec::new();
            for j in 0..m.len() {
                let cofactor = poly_mul(&m[0][j], &det_poly(&minor(m, j)));
                acc = poly_add(&acc, &if j % 2 == 0 { cofactor } else { poly_neg(&cofactor) });
            }
            acc
        }
    }
}

fn char_poly_by_cofactors(m: &ExactMatrix) -> Poly {
    let n = m.rows();
    let entries: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let constant = -m.row(i).0[j].clone();
                    if i == j {
                        vec![constant, Scalar::one()]
                    } else {
                        vec![constant]
                    }
                })
                .collect()
        })
        .collect();
    let mut poly = det_poly(&entries);
    poly.resize(n + 1, Scalar::zero());
    poly
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, with_fractions: bool) -> ExactMatrix {
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let numer = rng.gen_range(-2..=2);
                    let denom = if with_fractions { rng.gen_range(1..=2) } else { 1 };
                    Scalar::from_ratio(numer, denom)
                })
                .collect()
        })
        .collect();
    ExactMatrix::from_rows(rows)
}

#[test]
fn trace_recurrence_agrees_with_cofactor_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut checked = 0;
    while checked < 1200 {
        let n = rng.gen_range(1..=4);
        let m = random_matrix(&mut rng, n, checked % 5 == 0);
        let fast = char_poly(&m);
        assert_eq!(fast.coeffs.len(), n + 1);
        assert_eq!(fast.coeffs[n], Scalar::one(), "characteristic polynomial must be monic");
        assert_eq!(
            fast.coeffs,
            char_poly_by_cofactors(&m),
            "coefficient mismatch for {m:?}"
        );
        checked += 1;
    }
}

#[test]
fn reported_roots_are_roots_with_honest_multiplicities() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    for _ in 0..400 {
        let n = rng.gen_range(1..=4);
        let m = random_matrix(&mut rng, n, false);
        let p = char_poly(&m);
        let spectrum = rational_spectrum(&p);
        let mut total = 0;
        let mut previous: Option<Scalar> = None;
        for (root, mult) in &spectrum.rational_roots {
            assert!(*mult >= 1);
            assert!(p.eval(root).is_zero(), "{root} is not a root of {:?}", p.coeffs);
            if let Some(prev) = &previous {
                assert!(root < prev, "roots must be sorted in decreasing order");
            }
            previous = Some(root.clone());
            total += mult;
        }
        assert!(total <= n);
        assert_eq!(spectrum.all_roots_rational, total == n);
        assert_eq!(
            spectrum.all_nonnegative,
            spectrum.rational_roots.iter().all(|(r, _)| !r.is_negative())
        );
    }
}

// ---------------------------------------------------------------------------
// Closed-form states vs. iterated ray sums, on arbitrary certificates.

fn scalar_strategy(lo: i64, hi: i64) -> impl Strategy<Value = Scalar> {
    (lo..=hi, 1i64..=3).prop_map(|(n, d)| Scalar::from_ratio(n, d))
}

fn vector_strategy(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = ExactVector> {
    proptest::collection::vec(scalar_strategy(lo, hi), n).prop_map(ExactVector)
}

fn certificate_strategy() -> impl Strategy<Value = GntaCertificate> {
    (1usize..=3, 0usize..=3).prop_flat_map(|(n, k)| {
        (
            vector_strategy(n, -4, 4),
            vector_strategy(n, -4, 4),
            proptest::collection::vec(vector_strategy(n, -4, 4), k),
            proptest::collection::vec(scalar_strategy(0, 4), k),
            proptest::collection::vec(scalar_strategy(0, 4), k.saturating_sub(1)),
        )
            .prop_map(|(x0, x1, rays, lambdas, mus)| GntaCertificate {
                x0,
                x1,
                rays,
                lambdas,
                mus,
            })
    })
}

fn unconstrained_program(dim: usize) -> LassoProgram {
    LassoProgram {
        var_names: (0..dim).map(|i| format!("v{i}")).collect(),
        stem: Transition::always_true(dim),
        loop_: Transition::always_true(dim),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn closed_form_matches_iteration(cert in certificate_strategy()) {
        let p = unconstrained_program(cert.dim());
        let states = unroll(&p, &cert, 21);
        for (t, state) in states.iter().enumerate().skip(1) {
            prop_assert_eq!(&closed_form_state(&cert, t), state, "diverged at t={}", t);
        }
    }
}

// ---------------------------------------------------------------------------
// Valid certificates really do describe infinite executions: build loops
// with known geometric behavior, validate the matching certificate, and
// check fifty unrolled steps against the loop relation itself.

#[test]
fn certified_runs_satisfy_the_loop_for_fifty_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let floors: Vec<Scalar> =
            (0..n).map(|_| Scalar::from_ratio(rng.gen_range(1..=4), rng.gen_range(1..=2))).collect();
        let growth: Vec<Scalar> =
            (0..n).map(|_| Scalar::from_ratio(rng.gen_range(2..=6), 2)).collect();

        // Loop: x_i >= floor_i, x_i' = growth_i * x_i (as two inequalities).
        let mut rows = Vec::new();
        for i in 0..n {
            let mut guard = ConstraintRow {
                coeffs_x: ExactVector::zeros(n),
                coeffs_xp: ExactVector::zeros(n),
                bound: -floors[i].clone(),
                strict: false,
            };
            guard.coeffs_x.0[i] = -Scalar::one();
            rows.push(guard);
            for sign in [1i64, -1] {
                let s = Scalar::from_int(sign);
                let mut update = ConstraintRow {
                    coeffs_x: ExactVector::zeros(n),
                    coeffs_xp: ExactVector::zeros(n),
                    bound: Scalar::zero(),
                    strict: false,
                };
                update.coeffs_xp.0[i] = s.clone();
                update.coeffs_x.0[i] = -(s * growth[i].clone());
                rows.push(update);
            }
        }
        let p = LassoProgram {
            var_names: (0..n).map(|i| format!("v{i}")).collect(),
            stem: Transition::always_true(n),
            loop_: Transition { rows, dim: n },
        };

        // One axis ray per variable; the starting point sits on the floor.
        let x1 = ExactVector(floors.clone());
        let rays: Vec<ExactVector> = (0..n)
            .map(|i| {
                let mut r = ExactVector::zeros(n);
                r.0[i] = floors[i].clone() * (growth[i].clone() - Scalar::one());
                r
            })
            .collect();
        let cert = GntaCertificate {
            x0: x1.clone(),
            x1,
            rays,
            lambdas: growth.clone(),
            mus: vec![Scalar::zero(); n.saturating_sub(1)],
        };

        let report = validate(&p, &cert);
        assert!(report.passed(), "generator produced an invalid certificate: {report}");

        let states = unroll(&p, &cert, 51);
        for pair in states.windows(2).skip(1) {
            assert!(
                holds(&p.loop_, &pair[0], &pair[1]),
                "unrolled step leaves the loop relation"
            );
        }
        // Spot-check the closed form deep into the run; exhaustive
        // agreement up to t=20 is covered separately.
        for t in [2usize, 13, 50] {
            assert_eq!(&closed_form_state(&cert, t), &states[t]);
        }
    }
}

// ---------------------------------------------------------------------------
// The constraint encoder and the validator must agree on every certificate,
// valid or not: substituting certificate values into the synthesis formula
// satisfies it exactly when direct validation passes.

fn flatten_certificate(c: &GntaCertificate) -> Vec<Scalar> {
    let mut values: Vec<Scalar> = Vec::new();
    values.extend(c.x0.iter().cloned());
    values.extend(c.x1.iter().cloned());
    for ray in &c.rays {
        values.extend(ray.iter().cloned());
    }
    values.extend(c.lambdas.iter().cloned());
    values.extend(c.mus.iter().cloned());
    values
}

fn row_strategy(n: usize) -> impl Strategy<Value = ConstraintRow> {
    (
        vector_strategy(n, -2, 2),
        vector_strategy(n, -2, 2),
        scalar_strategy(-3, 3),
        any::<bool>(),
    )
        .prop_map(|(coeffs_x, coeffs_xp, bound, strict)| ConstraintRow {
            coeffs_x,
            coeffs_xp,
            bound,
            strict,
        })
}

fn program_strategy() -> impl Strategy<Value = LassoProgram> {
    (1usize..=2).prop_flat_map(|n| {
        (
            proptest::collection::vec(row_strategy(n), 0..=2),
            proptest::collection::vec(row_strategy(n), 1..=3),
        )
            .prop_map(move |(stem_rows, loop_rows)| LassoProgram {
                var_names: (0..n).map(|i| format!("v{i}")).collect(),
                stem: Transition { rows: stem_rows, dim: n },
                loop_: Transition { rows: loop_rows, dim: n },
            })
    })
}

fn sized_certificate_strategy(n: usize, k: usize) -> impl Strategy<Value = GntaCertificate> {
    (
        vector_strategy(n, -3, 3),
        vector_strategy(n, -3, 3),
        proptest::collection::vec(vector_strategy(n, -3, 3), k),
        proptest::collection::vec(scalar_strategy(-1, 3), k),
        proptest::collection::vec(scalar_strategy(-1, 3), k.saturating_sub(1)),
    )
        .prop_map(|(x0, x1, rays, lambdas, mus)| GntaCertificate { x0, x1, rays, lambdas, mus })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn encoder_and_validator_agree(
        (p, cert) in program_strategy().prop_flat_map(|p| {
            let n = p.dim();
            (0usize..=2).prop_flat_map(move |k| {
                let p = p.clone();
                sized_certificate_strategy(n, k).prop_map(move |c| (p.clone(), c))
            })
        })
    ) {
        let formula = gnta_constraints(&p, cert.size());
        let values = flatten_certificate(&cert);
        let encoded = formula.satisfied_by(&values);
        let direct = validate(&p, &cert).passed();
        prop_assert_eq!(
            encoded,
            direct,
            "encoder says {}, validator says {} for {:?}",
            encoded,
            direct,
            cert
        );
    }

    #[test]
    fn program_source_round_trips(p in program_strategy()) {
        let text = p.to_source();
        let reparsed = parse_lasso(&text).unwrap_or_else(|e| {
            panic!("printed program failed to reparse: {e}\n{text}")
        });
        prop_assert_eq!(&reparsed, &p, "round trip changed the program:\n{}", text);
        prop_assert_eq!(reparsed.to_source(), text, "printing is not a fixpoint");
    }
}

// ---------------------------------------------------------------------------
// The backend only reports sat when the returned model exactly satisfies
// the formula. A scripted stand-in "solver" echoes arbitrary assignments;
// the backend must accept exactly those that check out.

fn smt_literal(s: &Scalar) -> String {
    let mag = s.abs();
    let body = if mag.is_integer() {
        mag.numer().to_string()
    } else {
        format!("(/ {} {})", mag.numer(), mag.denom())
    };
    if s.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

#[test]
fn backend_accepts_exactly_the_models_that_reevaluate() {
    let p = parse_lasso("vars: x; loop: x >= 0 && x' = x + 1;").unwrap();
    let formula = gnta_constraints(&p, 1);
    let names: Vec<String> = formula.unknowns.iter().map(|u| u.name.clone()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0xFA17);
    let mut accepted = 0;
    let mut rejected = 0;
    for _ in 0..40 {
        let values: Vec<Scalar> = names
            .iter()
            .map(|_| Scalar::from_ratio(rng.gen_range(-2..=2), rng.gen_range(1..=2)))
            .collect();
        let truly_satisfies = formula.satisfied_by(&values);

        let pairs: Vec<String> = names
            .iter()
            .zip(&values)
            .map(|(n, v)| format!("({n} {})", smt_literal(v)))
            .collect();
        let reply = format!("cat > /dev/null; echo sat; echo '({})'", pairs.join(" "));
        let cfg = SolverConfig {
            command: SolverCommand {
                program: "sh".to_string(),
                args: vec!["-c".to_string(), reply],
            },
            timeout_ms: 5_000,
            logic: Logic::QfNra,
            random_seed: None,
        };
        let outcome = solve(&formula, &cfg);
        if truly_satisfies {
            assert_eq!(outcome.status, SolveStatus::Sat, "refused a good model: {}", outcome.detail);
            accepted += 1;
        } else {
            assert_eq!(
                outcome.status,
                SolveStatus::ProcessError,
                "accepted a bad model: {values:?}"
            );
            rejected += 1;
        }
    }
    assert!(accepted > 0, "sampling never produced a satisfying assignment");
    assert!(rejected > 0, "sampling never produced a falsifying assignment");
}
