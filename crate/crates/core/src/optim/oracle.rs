use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::point::Point;
use crate::random::Rng64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle returned a subgradient of the wrong shape")]
    ShapeMismatch,
    #[error("oracle returned non-finite values")]
    NonFinite,
    #[error("oracle failed: {0}")]
    Failed(String),
}

/// First-order oracle of a convex function.
pub trait SubgradientOracle<P: Point> {
    fn value(&self, w: &P) -> Result<f64, OracleError>;
    /// A (possibly stochastic) subgradient at `w`, shaped like `w`.
    fn subgradient(&mut self, w: &P) -> Result<P, OracleError>;

    /// `(f(w), G)`
    fn evaluate(&mut self, w: &P) -> Result<(f64, P), OracleError> {
        Ok((self.value(w)?, self.subgradient(w)?))
    }
}

impl<P: Point, O: SubgradientOracle<P> + ?Sized> SubgradientOracle<P> for &mut O {
    fn value(&self, w: &P) -> Result<f64, OracleError> {
        (**self).value(w)
    }

    fn subgradient(&mut self, w: &P) -> Result<P, OracleError> {
        (**self).subgradient(w)
    }
}

/// Adds i.i.d. Gaussian noise to every subgradient entry, scaled so that
/// `E‖ξ‖_F² = noise²`. Values are reported noise-free.
pub struct NoisyOracle<O> {
    inner: O,
    noise: f64,
    rng: Rng64,
}

impl<O> NoisyOracle<O> {
    pub fn new(inner: O, noise: f64, rng: Rng64) -> Result<Self, OracleError> {
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(OracleError::Failed(format!("noise level must be finite and >= 0, got {noise}")));
        }
        Ok(Self { inner, noise, rng })
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: SubgradientOracle<Matrix>> SubgradientOracle<Matrix> for NoisyOracle<O> {
    fn value(&self, w: &Matrix) -> Result<f64, OracleError> {
        self.inner.value(w)
    }

    fn subgradient(&mut self, w: &Matrix) -> Result<Matrix, OracleError> {
        let mut g = self.inner.subgradient(w)?;
        if self.noise > 0.0 {
            let sd = self.noise / (g.len() as f64).sqrt();
            let normal = Normal::new(0.0, sd).map_err(|e| OracleError::Failed(e.to_string()))?;
            for x in g.as_mut_slice() {
                *x += normal.sample(&mut self.rng);
            }
        }
        Ok(g)
    }
}

/// `f(W) = Σ_j |⟨a_j, diag(W)⟩ + b_j|` with the subgradient
/// `Σ_j sign(⟨a_j, diag(W)⟩ + b_j) a_j` placed on the diagonal.
///
/// Works on square matrices (diagonal embedding) and on column vectors of the
/// same length (the diagonal itself), so the two share one code path.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalAbsOracle {
    pub terms: Vec<(Vec<f64>, f64)>,
    pub dim: usize,
}

impl DiagonalAbsOracle {
    pub fn new(terms: Vec<(Vec<f64>, f64)>) -> Result<Self, OracleError> {
        let dim = terms.first().map(|(a, _)| a.len()).unwrap_or(0);
        if dim == 0 || terms.iter().any(|(a, _)| a.len() != dim) {
            return Err(OracleError::Failed("terms must be nonempty with equal lengths".into()));
        }
        Ok(Self { terms, dim })
    }

    fn diagonal(&self, w: &Matrix) -> Result<Vec<f64>, OracleError> {
        if w.shape() == (self.dim, self.dim) {
            Ok(w.diag())
        } else if w.shape() == (self.dim, 1) {
            Ok(w.as_slice().to_vec())
        } else {
            Err(OracleError::ShapeMismatch)
        }
    }

    fn residual(a: &[f64], b: f64, x: &[f64]) -> f64 {
        a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + b
    }
}

impl SubgradientOracle<Matrix> for DiagonalAbsOracle {
    fn value(&self, w: &Matrix) -> Result<f64, OracleError> {
        let x = self.diagonal(w)?;
        Ok(self.terms.iter().map(|(a, b)| Self::residual(a, *b, &x).abs()).sum())
    }

    fn subgradient(&mut self, w: &Matrix) -> Result<Matrix, OracleError> {
        let x = self.diagonal(w)?;
        let mut g = vec![0.0; self.dim];
        for (a, b) in &self.terms {
            let s = crate::linalg::sign(Self::residual(a, *b, &x));
            for (gi, ai) in g.iter_mut().zip(a) {
                *gi += s * ai;
            }
        }
        Ok(if w.shape() == (self.dim, self.dim) {
            Matrix::from_diag(self.dim, self.dim, &g)
        } else {
            Matrix::column(&g)
        })
    }
}

/// Oracle backed by a pair of closures.
pub struct FnOracle<V, G> {
    value: V,
    grad: G,
}

impl<V, G> FnOracle<V, G> {
    pub fn new(value: V, grad: G) -> Self {
        Self { value, grad }
    }
}

impl<P, V, G> SubgradientOracle<P> for FnOracle<V, G>
where
    P: Point,
    V: Fn(&P) -> f64,
    G: FnMut(&P) -> P,
{
    fn value(&self, w: &P) -> Result<f64, OracleError> {
        Ok((self.value)(w))
    }

    fn subgradient(&mut self, w: &P) -> Result<P, OracleError> {
        Ok((self.grad)(w))
    }
}
