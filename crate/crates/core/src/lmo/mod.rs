//! Norm specifications, dual norms, least-Frobenius LMO selections and the
//! compression operators they induce.
//!
//! For a norm `‖·‖` with `α‖W‖_F ≤ ‖W‖ ≤ β‖W‖_F`, the sharp map
//! `𝒞(W) = α² ‖W‖_* LMO(W)` satisfies `‖W − 𝒞(W)‖_F² ≤ (1 − δ)‖W‖_F²` with
//! `δ = α²/β²`. [`compress`] implements that map for every [`NormSpec`].
//!
//! The LMO is set-valued in general; this module always returns the element
//! of least Frobenius norm, which makes every output unique (zeros on tied or
//! null directions, `lmo_min(0) = 0`).

mod dense;
mod product;

pub use product::{ParamPoint, ProductNormSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::point::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmoError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Which norm drives the dual norm, the LMO and the compressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpec {
    /// `‖·‖₁` on vectors.
    L1,
    /// Euclidean norm on vectors.
    L2,
    /// `‖·‖_∞` on vectors.
    Linf,
    /// `‖·‖_p` on vectors, `p ≥ 1`.
    Lp(f64),
    /// Spectral norm on matrices.
    Operator,
    /// Nuclear norm on matrices.
    Nuclear,
    /// Layerwise product norm over `(W¹, …, Wᴸ, θ)`.
    Product(ProductNormSpec),
}

impl NormSpec {
    pub fn validate(&self) -> Result<(), LmoError> {
        match self {
            NormSpec::Lp(p) if !(*p >= 1.0 && p.is_finite()) => {
                Err(LmoError::InvalidSpec(format!("Lp needs p in [1, inf), got {p}")))
            }
            NormSpec::Product(p) => p.validate(),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            NormSpec::L1 => "l1".into(),
            NormSpec::L2 => "l2".into(),
            NormSpec::Linf => "linf".into(),
            NormSpec::Lp(p) => format!("l{p}"),
            NormSpec::Operator => "operator".into(),
            NormSpec::Nuclear => "nuclear".into(),
            NormSpec::Product(_) => "product".into(),
        }
    }

    /// Compressor constants for a `rows × cols` operand (vector norms use
    /// `d = rows·cols`). The product norm ignores the shape and uses its own
    /// layer dimensions.
    pub fn constants(&self, rows: usize, cols: usize) -> Result<CompressorConstants, LmoError> {
        self.validate()?;
        let vector_dim = || -> Result<f64, LmoError> {
            if rows == 1 || cols == 1 {
                Ok((rows * cols) as f64)
            } else {
                Err(LmoError::ShapeMismatch(format!(
                    "{} is a vector norm, got a {rows}x{cols} operand",
                    self.name()
                )))
            }
        };
        let r = rows.min(cols) as f64;
        let (alpha_sq, beta_sq) = match self {
            NormSpec::L1 => (1.0, vector_dim()?),
            NormSpec::L2 => (1.0, 1.0),
            NormSpec::Linf => (1.0 / vector_dim()?, 1.0),
            NormSpec::Lp(p) => {
                let d = vector_dim()?;
                let e = 1.0 / p - 0.5;
                // ‖x‖_p between d^{min(0,e)}‖x‖₂ and d^{max(0,e)}‖x‖₂
                (d.powf(2.0 * e.min(0.0)), d.powf(2.0 * e.max(0.0)))
            }
            NormSpec::Operator => (1.0 / r, 1.0),
            NormSpec::Nuclear => (1.0, r),
            NormSpec::Product(p) => return Ok(p.constants()),
        };
        Ok(CompressorConstants::from_squares(alpha_sq, beta_sq))
    }
}

/// Norm-equivalence constants `α‖W‖_F ≤ ‖W‖ ≤ β‖W‖_F` and the resulting
/// compression quality `δ = α²/β²`. The squares are kept exactly so that
/// compressor scalings such as `1/r` carry no rounding from a square root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorConstants {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_sq: f64,
    pub beta_sq: f64,
    pub delta: f64,
}

impl CompressorConstants {
    pub fn from_squares(alpha_sq: f64, beta_sq: f64) -> Self {
        Self {
            alpha: alpha_sq.sqrt(),
            beta: beta_sq.sqrt(),
            alpha_sq,
            beta_sq,
            delta: alpha_sq / beta_sq,
        }
    }
}

/// Iterates that know how to evaluate norms, dual norms and LMOs under a
/// [`NormSpec`].
pub trait NormedPoint: Point {
    fn primal_norm(&self, spec: &NormSpec) -> Result<f64, LmoError>;
    fn dual_norm(&self, spec: &NormSpec) -> Result<f64, LmoError>;
    /// Least-Frobenius element of `argmax_{‖X‖ ≤ 1} ⟨X, self⟩`.
    fn lmo_min(&self, spec: &NormSpec) -> Result<Self, LmoError>;
    fn compressor_constants(&self, spec: &NormSpec) -> Result<CompressorConstants, LmoError>;
}

pub fn primal_norm<P: NormedPoint>(w: &P, spec: &NormSpec) -> Result<f64, LmoError> {
    w.primal_norm(spec)
}

pub fn dual_norm<P: NormedPoint>(w: &P, spec: &NormSpec) -> Result<f64, LmoError> {
    w.dual_norm(spec)
}

pub fn lmo_min<P: NormedPoint>(w: &P, spec: &NormSpec) -> Result<P, LmoError> {
    w.lmo_min(spec)
}

/// `𝒞(W) = α² ‖W‖_* LMO(W)`; `compress(0) = 0`.
pub fn compress<P: NormedPoint>(w: &P, spec: &NormSpec) -> Result<P, LmoError> {
    let consts = w.compressor_constants(spec)?;
    let dual = w.dual_norm(spec)?;
    let mut out = w.lmo_min(spec)?;
    out.scale_mut(consts.alpha_sq * dual);
    Ok(out)
}

/// A map used as the compressor in error feedback.
pub trait Compressor<P>: Send + Sync {
    fn compress(&self, p: &P) -> Result<P, LmoError>;
    /// Contraction constant `δ` of the map for operands shaped like `p`.
    fn delta(&self, p: &P) -> Result<f64, LmoError>;
}

/// `𝒞 = id`, `δ = 1`. Turns EF-M into plain momentum SGD.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityCompressor;

impl<P: Point> Compressor<P> for IdentityCompressor {
    fn compress(&self, p: &P) -> Result<P, LmoError> {
        Ok(p.clone())
    }

    fn delta(&self, _: &P) -> Result<f64, LmoError> {
        Ok(1.0)
    }
}

impl<P: NormedPoint> Compressor<P> for NormSpec {
    fn compress(&self, p: &P) -> Result<P, LmoError> {
        compress(p, self)
    }

    fn delta(&self, p: &P) -> Result<f64, LmoError> {
        Ok(p.compressor_constants(self)?.delta)
    }
}
