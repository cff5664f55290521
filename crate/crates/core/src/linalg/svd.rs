use super::{tol, LinalgError, Matrix};

/// Reduced SVD `A = U·diag(sigma)·Vt` keeping only the `rank` retained
/// singular values, in nonincreasing order.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `m × rank`, orthonormal columns.
    pub u: Matrix,
    /// Strictly positive, nonincreasing.
    pub sigma: Vec<f64>,
    /// `rank × n`, orthonormal rows.
    pub vt: Matrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.sigma.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        if self.rank() == 0 {
            return Matrix::zeros_unchecked(self.u.rows(), self.vt.cols());
        }
        us.matmul(&self.vt).expect("factor shapes agree")
    }
}

/// Reduced SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Singular values `≤ rel_tol · σ_max` are dropped, so `rank` counts the
/// retained ones. The zero matrix has rank 0 and empty factors.
pub fn reduced_svd(a: &Matrix, rel_tol: f64) -> Result<SvdFactors, LinalgError> {
    if !(rel_tol > 0.0) {
        return Err(LinalgError::InvalidArgument(format!(
            "SVD truncation tolerance must be positive, got {rel_tol}"
        )));
    }
    if let Some(pos) = a.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite {
            row: pos / a.cols(),
            col: pos % a.cols(),
        });
    }
    if a.rows() < a.cols() {
        let t = reduced_svd(&a.transpose(), rel_tol)?;
        return Ok(SvdFactors {
            u: t.vt.transpose(),
            sigma: t.sigma,
            vt: t.u.transpose(),
        });
    }

    let (m, n) = a.shape();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col_vec(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let threshold = f64::EPSILON * m as f64;
    // A column at rounding-noise level moves its partner by O(noise²) at most;
    // rotating against it only chases noise and can stall convergence.
    let negligible = (f64::EPSILON * a.fro_norm()).powi(2);
    let mut converged = n < 2;
    let mut worst = 0.0;
    for _sweep in 0..tol::SVD_MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        worst = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || alpha.min(beta) <= negligible {
                    continue;
                }
                let ratio = gamma.abs() / (alpha * beta).sqrt();
                if !(ratio > threshold) {
                    continue;
                }
                converged = false;
                worst = f64::max(worst, ratio);
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: tol::SVD_MAX_SWEEPS,
            residual: worst,
        });
    }

    let mut order: Vec<(f64, usize)> = cols.iter().map(|c| (dot(c, c).sqrt(), 0)).collect();
    for (j, o) in order.iter_mut().enumerate() {
        o.1 = j;
    }
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let smax = order.first().map_or(0.0, |o| o.0);
    let cutoff = rel_tol * smax;

    let mut sigma = Vec::new();
    let mut u_cols = Vec::new();
    let mut v_rows = Vec::new();
    for &(s, j) in &order {
        if s == 0.0 || s <= cutoff {
            break;
        }
        sigma.push(s);
        u_cols.push(cols[j].iter().map(|x| x / s).collect::<Vec<_>>());
        v_rows.push(v[j].clone());
    }
    let r = sigma.len();
    let u = Matrix::from_columns(m, &u_cols);
    let mut vt = Matrix::zeros_unchecked(r, n);
    for (i, row) in v_rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            vt[(i, j)] = x;
        }
    }
    Ok(SvdFactors { u, sigma, vt })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}
