use super::{CompressorConstants, LmoError, NormSpec, NormedPoint};
use crate::linalg::{norm, polar_exact, reduced_svd, sign, tol, Matrix, NormKind};

fn require_vector(w: &Matrix, spec: &NormSpec) -> Result<(), LmoError> {
    if w.is_vector() {
        Ok(())
    } else {
        Err(LmoError::ShapeMismatch(format!(
            "{} is a vector norm, got a {}x{} operand",
            spec.name(),
            w.rows(),
            w.cols()
        )))
    }
}

fn product_on_matrix() -> LmoError {
    LmoError::ShapeMismatch("the product norm acts on a ParamPoint, not a single matrix".into())
}

/// Hölder conjugate of `p`.
fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

impl NormedPoint for Matrix {
    fn primal_norm(&self, spec: &NormSpec) -> Result<f64, LmoError> {
        spec.validate()?;
        let kind = match spec {
            NormSpec::L1 => NormKind::L1,
            NormSpec::L2 => NormKind::L2,
            NormSpec::Linf => NormKind::Linf,
            NormSpec::Lp(p) => NormKind::Lp(*p),
            NormSpec::Operator => NormKind::Operator,
            NormSpec::Nuclear => NormKind::Nuclear,
            NormSpec::Product(_) => return Err(product_on_matrix()),
        };
        Ok(norm(self, kind)?)
    }

    fn dual_norm(&self, spec: &NormSpec) -> Result<f64, LmoError> {
        spec.validate()?;
        let kind = match spec {
            NormSpec::L1 => NormKind::Linf,
            NormSpec::L2 => NormKind::L2,
            NormSpec::Linf => NormKind::L1,
            NormSpec::Lp(p) if *p == 1.0 => NormKind::Linf,
            NormSpec::Lp(p) => NormKind::Lp(conjugate(*p)),
            NormSpec::Operator => NormKind::Nuclear,
            NormSpec::Nuclear => NormKind::Operator,
            NormSpec::Product(_) => return Err(product_on_matrix()),
        };
        Ok(norm(self, kind)?)
    }

    fn lmo_min(&self, spec: &NormSpec) -> Result<Matrix, LmoError> {
        spec.validate()?;
        if let NormSpec::Product(_) = spec {
            return Err(product_on_matrix());
        }
        if !matches!(spec, NormSpec::Operator | NormSpec::Nuclear) {
            require_vector(self, spec)?;
        }
        if self.is_zero() {
            return Ok(Matrix::zeros(self.rows(), self.cols()));
        }
        Ok(match spec {
            NormSpec::L1 => l1_lmo(self),
            NormSpec::Lp(p) if *p == 1.0 => l1_lmo(self),
            NormSpec::L2 => self.scaled(1.0 / self.fro_norm()),
            NormSpec::Lp(p) if *p == 2.0 => self.scaled(1.0 / self.fro_norm()),
            NormSpec::Linf => self.map(sign),
            NormSpec::Lp(p) => {
                // x_i = sign(w_i) (|w_i| / ‖w‖_q)^{q-1}
                let q = conjugate(*p);
                let wq = norm(self, NormKind::Lp(q))?;
                self.map(|w| sign(w) * (w.abs() / wq).powf(q - 1.0))
            }
            NormSpec::Operator => polar_exact(self)?,
            NormSpec::Nuclear => nuclear_lmo(self)?,
            NormSpec::Product(_) => unreachable!(),
        })
    }

    fn compressor_constants(&self, spec: &NormSpec) -> Result<CompressorConstants, LmoError> {
        if let NormSpec::Product(_) = spec {
            return Err(product_on_matrix());
        }
        spec.constants(self.rows(), self.cols())
    }
}

/// Mass split evenly over the coordinates of largest magnitude.
fn l1_lmo(w: &Matrix) -> Matrix {
    let top = w.max_abs();
    let ties = w.as_slice().iter().filter(|x| x.abs() == top).count() as f64;
    w.map(|x| if x.abs() == top { sign(x) / ties } else { 0.0 })
}

/// `(1/k) Σ_{i ≤ k} u_i v_iᵀ` over the top singular group of multiplicity `k`.
fn nuclear_lmo(w: &Matrix) -> Result<Matrix, LmoError> {
    let f = reduced_svd(w, tol::SVD_RANK)?;
    let top = f.sigma[0];
    let k = f
        .sigma
        .iter()
        .take_while(|&&s| s >= top * (1.0 - tol::SINGULAR_TIE))
        .count();
    let mut out = Matrix::zeros(w.rows(), w.cols());
    for g in 0..k {
        for i in 0..w.rows() {
            let ui = f.u[(i, g)] / k as f64;
            for j in 0..w.cols() {
                out[(i, j)] += ui * f.vt[(g, j)];
            }
        }
    }
    Ok(out)
}
