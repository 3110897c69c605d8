//! Decision procedures for conjunctive linear lasso programs.
//!
//! A lasso program is a straight-line stem followed by a loop, both given
//! as conjunctions of (strict or non-strict) linear constraints over
//! program variables and their primed successors. This crate can:
//!
//! * decide nontermination by synthesizing a geometric certificate: a
//!   start point, a loop entry point, and a set of rays whose geometric
//!   sum traces an infinite execution ([`synthesis::analyze`]);
//! * check such certificates with exact rational arithmetic, no solver
//!   involved ([`cert::validate`]);
//! * materialize the certified execution step by step ([`cert::unroll`])
//!   or in closed form ([`cert::closed_form_state`]);
//! * prove termination outright for loops whose update matrix is a
//!   nilpotent perturbation of the identity, producing a checkable nested
//!   ranking witness ([`eigen::nested_ranking_check`]).
//!
//! Synthesis talks to any SMT-LIB 2 solver over a pipe ([`smt`]); every
//! model a solver returns is re-verified exactly before it is trusted.

pub mod cert;
pub mod eigen;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod smt;
pub mod synthesis;

pub use cert::{
    closed_form_state, deserialize, serialize, unroll, validate, GntaCertificate, UMatrix,
    ValidationReport,
};
pub use eigen::{
    char_poly, nested_ranking_check, rational_spectrum, shift_nilpotence_index, validate_witness,
    CharPoly, NestedRankingWitness, SpectrumReport,
};
pub use linalg::{ExactMatrix, ExactVector};
pub use model::{holds, parse_lasso, ConstraintRow, LassoProgram, Transition};
pub use scalar::Scalar;
pub use synthesis::{
    analyze, fixed_point, gnta_constraints, AnalysisMode, AnalysisRun, AnalysisVerdict,
    SynthesisOptions,
};
