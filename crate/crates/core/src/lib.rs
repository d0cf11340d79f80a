//! Randomized Kaczmarz solvers for the extended normal equations
//! `A^T A x = A^T b - c`, for arbitrary dense `A` (any shape, any rank).
//!
//! The crate has five pieces:
//!
//! * [`matrix`] — immutable row-major dense matrix with cached squared
//!   row/column norms, plus small vector helpers;
//! * [`sampling`] — reproducible weighted index sampling (inverse CDF over
//!   cumulative sums, SplitMix64 stream);
//! * [`solvers`] — the single (RK), double (RDK), and triple (RTK)
//!   randomized Kaczmarz iterations with convergence tracking;
//! * [`oracle`] — SVD-based reference solutions, the contraction constant
//!   rho, consistency classification, and the per-iteration error bounds
//!   the traces are compared against;
//! * [`problemgen`] — synthetic instances with known rank, bounded
//!   condition number, and chosen consistency class.
//!
//! Solvers touch one row or column per step; only the oracle and the
//! opt-in residual stop perform full matrix passes.

pub mod error;
pub mod matrix;
pub mod oracle;
pub mod problemgen;
pub mod sampling;
pub mod solvers;

pub use error::Error;
pub use matrix::DenseMatrix;
pub use oracle::{
    bound_rdk, bound_rk, bound_rtk, classify_consistency, reference_solutions, rho, Consistency,
    ReferenceSolutions, SpectralData,
};
pub use problemgen::{generate, generate_matrix, generate_rhs, GenSpec, ProblemInstance};
pub use sampling::{SeededRng, WeightedSampler};
pub use solvers::{
    col_project, rdk_run, rk_run, row_project, rtk_run, ConvergenceTrace, RdkState, RkState,
    RtkState, RunConfig, StopRule,
};
