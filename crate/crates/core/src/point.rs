//! Vector-space operations shared by every iterate type.

use std::fmt::Debug;

use crate::linalg::{norm, sign_elementwise, LinalgError, Matrix, NormKind};

/// An element of a finite-dimensional real inner-product space, with the
/// Frobenius inner product over all entries.
pub trait Point: Clone + Debug + Send + Sync {
    fn zeros_like(&self) -> Self;
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn scale_mut(&mut self, alpha: f64);
    fn dot(&self, other: &Self) -> f64;
    fn same_shape(&self, other: &Self) -> bool;
    fn is_finite(&self) -> bool;
    /// Elementwise sign with `sign(0) = 0`, applied to every block.
    fn sign(&self) -> Self;
    /// Sum of nuclear norms of the matrix blocks.
    fn nuclear_sum(&self) -> Result<f64, LinalgError>;
    /// `(W₁₁, W₂₂)` of the leading matrix block, `NaN` where out of range.
    fn leading_diag2(&self) -> [f64; 2];

    fn fro_norm_sq(&self) -> f64 {
        self.dot(self)
    }

    fn fro_norm(&self) -> f64 {
        self.fro_norm_sq().sqrt()
    }

    fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(alpha);
        out
    }

    /// `self − other`
    fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }
}

impl Point for Matrix {
    fn zeros_like(&self) -> Self {
        Matrix::zeros(self.rows(), self.cols())
    }

    fn axpy(&mut self, alpha: f64, x: &Self) {
        Matrix::axpy(self, alpha, x)
    }

    fn scale_mut(&mut self, alpha: f64) {
        Matrix::scale_mut(self, alpha)
    }

    fn dot(&self, other: &Self) -> f64 {
        Matrix::dot(self, other)
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    fn is_finite(&self) -> bool {
        Matrix::is_finite(self)
    }

    fn sign(&self) -> Self {
        sign_elementwise(self)
    }

    fn nuclear_sum(&self) -> Result<f64, LinalgError> {
        norm(self, NormKind::Nuclear)
    }

    fn leading_diag2(&self) -> [f64; 2] {
        let at = |i: usize| {
            if i < self.min_dim() {
                self[(i, i)]
            } else {
                f64::NAN
            }
        };
        [at(0), at(1)]
    }
}
