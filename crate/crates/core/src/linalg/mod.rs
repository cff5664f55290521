//! Dense matrix kernels: reduced SVD, polar factor (exact and Newton–Schulz),
//! elementwise sign and the scalar norms used by the rest of the crate.
//!
//! Everything here is a pure function on owned or borrowed values.

mod matrix;
mod norms;
mod polar;
mod svd;

pub use matrix::Matrix;
pub use norms::{norm, NormKind};
pub use polar::{polar_exact, polar_exact_with_tol, polar_newton_schulz, sign_elementwise, sign, NsPolar};
pub use svd::{reduced_svd, SvdFactors};

use thiserror::Error;

/// Centralized numerical tolerances. Every function that uses one also has a
/// variant or argument that lets the caller override it.
pub mod tol {
    /// Singular values `≤ SVD_RANK * σ_max` are treated as zero.
    pub const SVD_RANK: f64 = 1e-12;
    /// Upper bound on one-sided Jacobi sweeps before reporting non-convergence.
    pub const SVD_MAX_SWEEPS: usize = 80;
    /// Default number of cubic Newton–Schulz iterations.
    pub const NS_ITERS: usize = 32;
    /// Relative tolerance used to group tied singular values.
    pub const SINGULAR_TIE: f64 = 1e-12;
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix shape {rows}x{cols} is empty")]
    EmptyShape { rows: usize, cols: usize },
    #[error("expected {expected} entries, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op}: operand must be a vector (1 row or 1 column), got {rows}x{cols}")]
    NotAVector {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal ratio {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("Newton-Schulz diverged at iteration {iter} (|X|_F = {fro:e})")]
    Divergence { iter: usize, fro: f64 },
}

impl LinalgError {
    /// True for failures of an iterative method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Self::NoConvergence { .. } | Self::Divergence { .. })
    }
}
