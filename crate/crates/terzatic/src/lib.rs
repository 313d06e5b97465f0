//! Evaluation and verification of Jensen-type functional inequalities for
//! superterzatic functions.
//!
//! The crate computes the Jensen gap and its tensor-weighted
//! generalization over block instances, checks the superterzatic
//! lower-bound inequality and the two-sided bounds induced by the extreme
//! tensor-weight ratios, estimates sharp certificate constants by
//! barycenter-constrained sampling, and searches for violations with a
//! seeded fuzzer. Every computation runs either in 64-bit floats or in
//! exact rational arithmetic; the rational route doubles as a bit-exact
//! oracle for the float route.

pub mod bounds;
pub mod check;
pub mod commands;
pub mod error;
pub mod estimate;
pub mod format;
pub mod function;
pub mod functional;
pub mod fuzz;
pub mod instance;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod seeding;
pub mod selftest;

pub use bounds::{
    corollary8_check, ratio_extrema, replicate_instance, theorem6_lower_check,
    theorem6_upper_check, RatioExtrema, Side,
};
pub use check::{
    check_def2, check_lemma5, def2_rhs, def2_rhs_alt, feasibility_threshold, lemma5_rhs,
};
pub use error::{Error, Result};
pub use estimate::{
    estimate_certificate, sample_instance_with_barycenter, CertificateEstimate, ThresholdSummary,
};
pub use function::{terza_quotient, Claim, Family, FunctionModel, Polynomial};
pub use functional::{
    generalized_jensen, generalized_jensen_merged, jensen, tensor_distribution, Atom,
    AtomDistribution,
};
pub use fuzz::{gen_general, gen_simple, replay_trial, run_fuzz, FuzzConfig, FuzzReport, ShapeRange, Violation};
pub use instance::{
    multi_indices, GeneralInstance, MultiIndex, PointVector, SimpleInstance, WeightFamily,
    Weights, BRUTE_CAP, DEFAULT_ENUM_CAP,
};
pub use report::{CertSource, CheckReport, Direction, Target, Threshold, Verdict};
pub use scalar::{Rat, Scalar};
pub use seeding::derive_subseed;
