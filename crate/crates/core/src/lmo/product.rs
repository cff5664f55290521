use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CompressorConstants, LmoError, NormSpec, NormedPoint};
use crate::linalg::{norm, polar_exact, sign, LinalgError, Matrix, NormKind};
use crate::point::Point;
use crate::random::{gaussian, gaussian_matrix, gaussian_vec};

/// Layer shapes and scale of the product norm
/// `‖W‖ = ((max_ℓ √(d_ℓ/s) ‖Wˡ‖_op)² + k ‖θ‖_∞²)^{1/2}`, `d_ℓ = min(m_ℓ, n_ℓ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductNormSpec {
    pub layer_dims: Vec<(usize, usize)>,
    pub s: f64,
    pub k: usize,
}

impl ProductNormSpec {
    pub fn new(layer_dims: Vec<(usize, usize)>, s: f64, k: usize) -> Result<Self, LmoError> {
        let spec = Self { layer_dims, s, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LmoError> {
        if self.layer_dims.is_empty() {
            return Err(LmoError::InvalidSpec("product norm needs at least one layer".into()));
        }
        if self.layer_dims.iter().any(|&(m, n)| m == 0 || n == 0) {
            return Err(LmoError::InvalidSpec("layer dimensions must be positive".into()));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(LmoError::InvalidSpec(format!("scale s must be positive, got {}", self.s)));
        }
        if self.k == 0 {
            return Err(LmoError::InvalidSpec("vector block length k must be positive".into()));
        }
        Ok(())
    }

    pub fn layers(&self) -> usize {
        self.layer_dims.len()
    }

    /// `d_ℓ = min(m_ℓ, n_ℓ)`
    pub fn d(&self, layer: usize) -> usize {
        let (m, n) = self.layer_dims[layer];
        m.min(n)
    }

    /// `α = min{1, 1/√(sL)}` from the lower norm-equivalence bound, and the
    /// exact upper constant `β = √max(max_ℓ d_ℓ/s, k)`.
    ///
    /// `β` is attained by a rank-one matrix in the widest layer or by a single
    /// θ coordinate; [`empirical_beta`](Self::empirical_beta) cross-checks it.
    pub fn constants(&self) -> CompressorConstants {
        let l = self.layers() as f64;
        let alpha_sq = f64::min(1.0, 1.0 / (self.s * l));
        let dmax = (0..self.layers()).map(|i| self.d(i)).max().unwrap_or(1) as f64;
        let beta_sq = f64::max(dmax / self.s, self.k as f64);
        CompressorConstants::from_squares(alpha_sq, beta_sq)
    }

    /// Largest `‖W‖ / ‖W‖_F` seen over `samples` random directions, mixing
    /// Gaussian points with single-layer rank-one and single-coordinate
    /// probes. A lower estimate of `β`.
    pub fn empirical_beta<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> Result<f64, LmoError> {
        let mut best: f64 = 0.0;
        for i in 0..samples {
            let mut w = ParamPoint::zeros(self);
            match i % 3 {
                0 => w = ParamPoint::gaussian(self, rng),
                1 => {
                    let l = rng.random_range(0..self.layers());
                    let (m, n) = self.layer_dims[l];
                    let u = gaussian_matrix(rng, m, 1);
                    let v = gaussian_matrix(rng, 1, n);
                    w.matrices[l] = u.matmul(&v)?;
                }
                _ => {
                    let j = rng.random_range(0..self.k);
                    w.theta[j] = gaussian(rng);
                }
            }
            let f = w.fro_norm();
            if f > 0.0 {
                best = best.max(w.primal_norm(&NormSpec::Product(self.clone()))? / f);
            }
        }
        Ok(best)
    }

    /// `y(W) = Σ_ℓ ‖Wˡ‖_nuc / √d_ℓ`
    pub fn y(&self, w: &ParamPoint) -> Result<f64, LmoError> {
        self.check(w)?;
        let mut y = 0.0;
        for (l, m) in w.matrices.iter().enumerate() {
            y += norm(m, NormKind::Nuclear)? / (self.d(l) as f64).sqrt();
        }
        Ok(y)
    }

    /// Closed-form compressor
    /// `min{s, 1/L} (y/√d₁ polar(W¹), …, y/√d_L polar(Wᴸ), ‖θ‖₁/(sk) sign θ)`.
    pub fn compress_closed_form(&self, w: &ParamPoint) -> Result<ParamPoint, LmoError> {
        let y = self.y(w)?;
        let factor = f64::min(self.s, 1.0 / self.layers() as f64);
        let matrices = w
            .matrices
            .iter()
            .enumerate()
            .map(|(l, m)| Ok(polar_exact(m)?.scaled(factor * y / (self.d(l) as f64).sqrt())))
            .collect::<Result<Vec<_>, LinalgError>>()?;
        let l1: f64 = w.theta.iter().map(|x| x.abs()).sum();
        let tscale = factor * l1 / (self.s * self.k as f64);
        let theta = w.theta.iter().map(|&x| tscale * sign(x)).collect();
        Ok(ParamPoint { matrices, theta })
    }

    fn check(&self, w: &ParamPoint) -> Result<(), LmoError> {
        self.validate()?;
        if w.matrices.len() != self.layers() {
            return Err(LmoError::ShapeMismatch(format!(
                "expected {} layers, got {}",
                self.layers(),
                w.matrices.len()
            )));
        }
        for (l, (m, &dims)) in w.matrices.iter().zip(&self.layer_dims).enumerate() {
            if m.shape() != dims {
                return Err(LmoError::ShapeMismatch(format!(
                    "layer {l}: expected {dims:?}, got {:?}",
                    m.shape()
                )));
            }
        }
        if w.theta.len() != self.k {
            return Err(LmoError::ShapeMismatch(format!(
                "theta: expected length {}, got {}",
                self.k,
                w.theta.len()
            )));
        }
        Ok(())
    }
}

/// `(W¹, …, Wᴸ, θ)`
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    pub matrices: Vec<Matrix>,
    pub theta: Vec<f64>,
}

impl ParamPoint {
    pub fn new(matrices: Vec<Matrix>, theta: Vec<f64>) -> Result<Self, LmoError> {
        if matrices.is_empty() {
            return Err(LmoError::ShapeMismatch("a ParamPoint needs at least one matrix".into()));
        }
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(LmoError::Linalg(LinalgError::InvalidArgument(
                "theta has non-finite entries".into(),
            )));
        }
        Ok(Self { matrices, theta })
    }

    pub fn zeros(spec: &ProductNormSpec) -> Self {
        Self {
            matrices: spec.layer_dims.iter().map(|&(m, n)| Matrix::zeros(m, n)).collect(),
            theta: vec![0.0; spec.k],
        }
    }

    pub fn gaussian<R: Rng + ?Sized>(spec: &ProductNormSpec, rng: &mut R) -> Self {
        Self {
            matrices: spec
                .layer_dims
                .iter()
                .map(|&(m, n)| gaussian_matrix(rng, m, n))
                .collect(),
            theta: gaussian_vec(rng, spec.k),
        }
    }

    pub fn fits(&self, spec: &ProductNormSpec) -> bool {
        spec.check(self).is_ok()
    }
}

impl Point for ParamPoint {
    fn zeros_like(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(Point::zeros_like).collect(),
            theta: vec![0.0; self.theta.len()],
        }
    }

    fn axpy(&mut self, alpha: f64, x: &Self) {
        assert!(self.same_shape(x), "axpy: shape mismatch");
        for (a, b) in self.matrices.iter_mut().zip(&x.matrices) {
            a.axpy(alpha, b);
        }
        for (a, b) in self.theta.iter_mut().zip(&x.theta) {
            *a += alpha * b;
        }
    }

    fn scale_mut(&mut self, alpha: f64) {
        for m in &mut self.matrices {
            m.scale_mut(alpha);
        }
        for t in &mut self.theta {
            *t *= alpha;
        }
    }

    fn dot(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other), "dot: shape mismatch");
        let mats: f64 = self.matrices.iter().zip(&other.matrices).map(|(a, b)| a.dot(b)).sum();
        let th: f64 = self.theta.iter().zip(&other.theta).map(|(a, b)| a * b).sum();
        mats + th
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.matrices.len() == other.matrices.len()
            && self.theta.len() == other.theta.len()
            && self.matrices.iter().zip(&other.matrices).all(|(a, b)| a.shape() == b.shape())
    }

    fn is_finite(&self) -> bool {
        self.matrices.iter().all(Matrix::is_finite) && self.theta.iter().all(|x| x.is_finite())
    }

    fn sign(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(Point::sign).collect(),
            theta: self.theta.iter().map(|&x| sign(x)).collect(),
        }
    }

    fn nuclear_sum(&self) -> Result<f64, LinalgError> {
        self.matrices.iter().map(|m| norm(m, NormKind::Nuclear)).sum()
    }

    fn leading_diag2(&self) -> [f64; 2] {
        self.matrices[0].leading_diag2()
    }
}

fn product_spec(spec: &NormSpec) -> Result<&ProductNormSpec, LmoError> {
    match spec {
        NormSpec::Product(p) => Ok(p),
        other => Err(LmoError::ShapeMismatch(format!(
            "a ParamPoint needs the product norm, got {}",
            other.name()
        ))),
    }
}

impl NormedPoint for ParamPoint {
    fn primal_norm(&self, spec: &NormSpec) -> Result<f64, LmoError> {
        let p = product_spec(spec)?;
        p.check(self)?;
        let mut layer_max: f64 = 0.0;
        for (l, m) in self.matrices.iter().enumerate() {
            let scaled = (p.d(l) as f64 / p.s).sqrt() * norm(m, NormKind::Operator)?;
            layer_max = layer_max.max(scaled);
        }
        let tinf = self.theta.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        Ok((layer_max * layer_max + p.k as f64 * tinf * tinf).sqrt())
    }

    /// `(s y(W)² + ‖θ‖₁²/k)^{1/2}`
    fn dual_norm(&self, spec: &NormSpec) -> Result<f64, LmoError> {
        let p = product_spec(spec)?;
        let y = p.y(self)?;
        let l1: f64 = self.theta.iter().map(|x| x.abs()).sum();
        Ok((p.s * y * y + l1 * l1 / p.k as f64).sqrt())
    }

    fn lmo_min(&self, spec: &NormSpec) -> Result<Self, LmoError> {
        let p = product_spec(spec)?;
        let dual = self.dual_norm(spec)?;
        if dual == 0.0 {
            return Ok(self.zeros_like());
        }
        let y = p.y(self)?;
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .map(|(l, m)| Ok(polar_exact(m)?.scaled(p.s * y / ((p.d(l) as f64).sqrt() * dual))))
            .collect::<Result<Vec<_>, LinalgError>>()?;
        let l1: f64 = self.theta.iter().map(|x| x.abs()).sum();
        let tscale = l1 / (p.k as f64 * dual);
        let theta = self.theta.iter().map(|&x| tscale * sign(x)).collect();
        Ok(Self { matrices, theta })
    }

    fn compressor_constants(&self, spec: &NormSpec) -> Result<CompressorConstants, LmoError> {
        let p = product_spec(spec)?;
        p.check(self)?;
        Ok(p.constants())
    }
}
