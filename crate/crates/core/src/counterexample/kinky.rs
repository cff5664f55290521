use serde::{Deserialize, Serialize};

use super::CexError;
use crate::linalg::{sign, Matrix};
use crate::lmo::ParamPoint;
use crate::optim::{OracleError, SubgradientOracle};

/// Which subgradient to return on the kinks `W₁₁ = ±W₂₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgradientSelection {
    /// `sign(0) = 0`, the minimum-norm choice.
    #[default]
    FrameworkZero,
    /// `sign(0) = s` with `s = ±1`.
    FixedSign(i8),
}

impl SubgradientSelection {
    fn sign(self, x: f64) -> f64 {
        match self {
            SubgradientSelection::FrameworkZero => sign(x),
            SubgradientSelection::FixedSign(s) if x == 0.0 => f64::from(s.signum()),
            SubgradientSelection::FixedSign(_) => sign(x),
        }
    }
}

/// `f(W) = c |W₁₁ + W₂₂| + |W₁₁ − W₂₂|` on `m × n` matrices, `m, n ≥ 2`.
///
/// Convex, nonnegative, minimized exactly where `W₁₁ = W₂₂ = 0`. Every
/// subgradient is zero outside the leading `2 × 2` diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkyFunction {
    rows: usize,
    cols: usize,
    c: f64,
    pub selection: SubgradientSelection,
}

impl KinkyFunction {
    pub fn new(rows: usize, cols: usize, c: f64) -> Result<Self, CexError> {
        if rows < 2 || cols < 2 {
            return Err(CexError::InvalidParameter(format!(
                "kinky function needs at least 2x2, got {rows}x{cols}"
            )));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(CexError::InvalidParameter(format!("c must lie in (0, 1), got {c}")));
        }
        Ok(Self {
            rows,
            cols,
            c,
            selection: SubgradientSelection::default(),
        })
    }

    pub fn with_selection(mut self, selection: SubgradientSelection) -> Result<Self, CexError> {
        if let SubgradientSelection::FixedSign(s) = selection {
            if s != 1 && s != -1 {
                return Err(CexError::InvalidParameter(format!("fixed sign must be +1 or -1, got {s}")));
            }
        }
        self.selection = selection;
        Ok(self)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `c |w₁ + w₂| + |w₁ − w₂|`
    pub fn diag_value(&self, w1: f64, w2: f64) -> f64 {
        f_diag_value(self.c, w1, w2)
    }

    pub fn value(&self, w: &Matrix) -> Result<f64, CexError> {
        self.check(w)?;
        Ok(self.diag_value(w[(0, 0)], w[(1, 1)]))
    }

    /// Diagonal part `c s₁ (1, 1) + s₂ (1, −1)` with `s₁ = sign(W₁₁ + W₂₂)`
    /// and `s₂ = sign(W₁₁ − W₂₂)` under the selection rule.
    pub fn subgradient(&self, w: &Matrix) -> Result<Matrix, CexError> {
        self.check(w)?;
        let [g1, g2] = self.diag_subgradient(w[(0, 0)], w[(1, 1)]);
        let mut g = Matrix::zeros(self.rows, self.cols);
        let slice = g.as_mut_slice();
        slice[0] = g1;
        slice[self.cols + 1] = g2;
        Ok(g)
    }

    pub fn diag_subgradient(&self, w1: f64, w2: f64) -> [f64; 2] {
        let s1 = self.selection.sign(w1 + w2);
        let s2 = self.selection.sign(w1 - w2);
        [self.c * s1 + s2, self.c * s1 - s2]
    }

    /// `√(2(1 + c²))`, a bound on every subgradient's Frobenius norm.
    pub fn lipschitz(&self) -> f64 {
        lipschitz_bound(self.c).unwrap_or(f64::NAN)
    }

    /// `m × n` zero matrix with the given leading diagonal pair.
    pub fn embed(&self, w1: f64, w2: f64) -> Matrix {
        let mut w = Matrix::zeros(self.rows, self.cols);
        let slice = w.as_mut_slice();
        slice[0] = w1;
        slice[self.cols + 1] = w2;
        w
    }

    fn check(&self, w: &Matrix) -> Result<(), CexError> {
        if w.shape() == (self.rows, self.cols) {
            Ok(())
        } else {
            Err(CexError::Shape(format!(
                "kinky function is defined on {}x{}, got {}x{}",
                self.rows,
                self.cols,
                w.rows(),
                w.cols()
            )))
        }
    }
}

pub fn f_diag_value(c: f64, w1: f64, w2: f64) -> f64 {
    c * (w1 + w2).abs() + (w1 - w2).abs()
}

/// `√(2(1 + c²))` for `c ∈ (0, 1]`.
pub fn lipschitz_bound(c: f64) -> Result<f64, CexError> {
    if c > 0.0 && c <= 1.0 {
        Ok((2.0 * (1.0 + c * c)).sqrt())
    } else {
        Err(CexError::InvalidParameter(format!("c must lie in (0, 1], got {c}")))
    }
}

fn oracle_err(e: CexError) -> OracleError {
    match e {
        CexError::Shape(_) => OracleError::ShapeMismatch,
        other => OracleError::Failed(other.to_string()),
    }
}

impl SubgradientOracle<Matrix> for KinkyFunction {
    fn value(&self, w: &Matrix) -> Result<f64, OracleError> {
        KinkyFunction::value(self, w).map_err(oracle_err)
    }

    fn subgradient(&mut self, w: &Matrix) -> Result<Matrix, OracleError> {
        KinkyFunction::subgradient(self, w).map_err(oracle_err)
    }
}

/// Acts on the first layer; every other block has zero subgradient.
impl SubgradientOracle<ParamPoint> for KinkyFunction {
    fn value(&self, w: &ParamPoint) -> Result<f64, OracleError> {
        let first = w.matrices.first().ok_or(OracleError::ShapeMismatch)?;
        KinkyFunction::value(self, first).map_err(oracle_err)
    }

    fn subgradient(&mut self, w: &ParamPoint) -> Result<ParamPoint, OracleError> {
        let first = w.matrices.first().ok_or(OracleError::ShapeMismatch)?;
        let mut g = crate::point::Point::zeros_like(w);
        g.matrices[0] = KinkyFunction::subgradient(self, first).map_err(oracle_err)?;
        Ok(g)
    }
}
