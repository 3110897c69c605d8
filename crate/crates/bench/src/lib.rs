//! Shared fixtures for the criterion benches. Nothing here touches a solver;
//! the benches measure the exact-arithmetic paths that dominate certificate
//! checking and run materialization.

use lassocert::{parse_lasso, ExactVector, GntaCertificate, LassoProgram, Scalar};

pub const GROWTH_SOURCE: &str =
    "vars: a b;\nstem: a' = a && b' = 1;\nloop: a + b >= 4 && a' = 3*a + b && b' = 2*b;\n";

pub fn growth_program() -> LassoProgram {
    parse_lasso(GROWTH_SOURCE).unwrap()
}

fn vector(entries: &[i64]) -> ExactVector {
    ExactVector(entries.iter().copied().map(Scalar::from_int).collect())
}

pub fn growth_certificate() -> GntaCertificate {
    GntaCertificate {
        x0: vector(&[3, 0]),
        x1: vector(&[3, 1]),
        rays: vec![vector(&[4, 0]), vector(&[3, 1])],
        lambdas: vec![Scalar::from_int(3), Scalar::from_int(2)],
        mus: vec![Scalar::one()],
    }
}

/// A wider synthetic instance: n independently growing coordinates, n rays,
/// all growth rates distinct so the closed form exercises the general
/// h-polynomial path rather than a repeated-eigenvalue shortcut.
pub fn wide_certificate(n: usize) -> (LassoProgram, GntaCertificate) {
    let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let mut conjuncts: Vec<String> = vec![format!("{} >= 1", vars[0])];
    for (i, v) in vars.iter().enumerate() {
        conjuncts.push(format!("{v}' = {rate}*{v}", rate = i + 2));
    }
    let source = format!("vars: {};\nloop: {};\n", vars.join(" "), conjuncts.join(" && "));
    let program = parse_lasso(&source).unwrap();

    let point = ExactVector(vec![Scalar::one(); n]);
    let rays: Vec<ExactVector> = (0..n)
        .map(|i| {
            let mut r = vec![Scalar::zero(); n];
            r[i] = Scalar::from_int(i as i64 + 1);
            ExactVector(r)
        })
        .collect();
    let lambdas: Vec<Scalar> = (0..n).map(|i| Scalar::from_int(i as i64 + 2)).collect();
    let mus = vec![Scalar::zero(); n.saturating_sub(1)];
    let cert = GntaCertificate { x0: point.clone(), x1: point, rays, lambdas, mus };
    (program, cert)
}
