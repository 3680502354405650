//! Numerical laboratory for weighted Hardy inequalities on the cone of
//! non-negative, non-increasing sequences.
//!
//! For a weight `b ≥ 0` and a non-increasing `λ ≥ 0` with partial sums `Λ`,
//! the inequality
//!
//! ```text
//! Σ_n b_n (Σ_{k≤n} λ_k x_k / Λ_n)^p ≤ U_p Σ_n b_n x_n^p
//! ```
//!
//! holds on non-increasing `x ≥ 0` exactly when
//! `Σ_{k≥n} b_k / Λ_k^p ≤ U'_p Λ_n^{-p} Σ_{k≤n} b_k` for every `n`. The crate
//! computes `U'_p` ([`constants`]), the resulting bounds on `U_p`, lower
//! estimates of `U_p` by optimization ([`optimizer`]) and randomized checks
//! of the supporting inequalities ([`oracles`]).

pub mod cli;
pub mod constants;
pub mod error;
pub mod functional;
pub mod model;
pub mod optimizer;
pub mod oracles;
pub mod report;

pub use constants::{
    best_u_prime, c_effective, c_refined, condition_ratio, tail_sum, u_bounds, BoundsReport,
    ConditionReport,
};
pub use error::{HardyError, Result};
pub use functional::{f_n, hardy_ratio, weighted_averages, RatioBreakdown};
pub use model::{ConeVector, LambdaSeq, Params, Tolerances, WeightKind, WeightSpec};
pub use optimizer::{
    estimate_best_constant, isotonic_project, projected_ascent, step_sweep, EstimateCertificate,
    EstimateOptions, Method,
};
pub use oracles::{CheckOutcome, Counterexample};
pub use report::{parse_weight_file, AnalysisReport};
