use super::{reduced_svd, tol, LinalgError, Matrix};

/// Scalar sign with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Entrywise sign, entries in `{-1, 0, 1}`.
pub fn sign_elementwise(a: &Matrix) -> Matrix {
    a.map(sign)
}

/// Polar factor `U Vᵀ` of the reduced SVD, with the default rank tolerance.
///
/// Null directions are dropped, so for rank-deficient input this is the
/// least-Frobenius element of the operator-norm LMO and `polar(0) = 0`.
/// Diagonal input (square or rectangular) returns the entrywise sign exactly,
/// with no rank truncation.
pub fn polar_exact(a: &Matrix) -> Result<Matrix, LinalgError> {
    if a.is_diagonal() && a.is_finite() {
        return Ok(sign_elementwise(a));
    }
    polar_exact_with_tol(a, tol::SVD_RANK)
}

pub fn polar_exact_with_tol(a: &Matrix, rel_tol: f64) -> Result<Matrix, LinalgError> {
    let f = reduced_svd(a, rel_tol)?;
    if f.rank() == 0 {
        return Ok(Matrix::zeros(a.rows(), a.cols()));
    }
    f.u.matmul(&f.vt)
}

/// Result of [`polar_newton_schulz`].
#[derive(Debug, Clone)]
pub struct NsPolar {
    pub matrix: Matrix,
    /// Set when the input was exactly zero; `matrix` is then zero too.
    pub zero_input: bool,
}

/// Approximate polar factor by the cubic Newton–Schulz iteration
/// `X ← 1.5 X − 0.5 X XᵀX`, starting from `A / s` where
/// `s = min(‖A‖_F, √(‖A‖₁‖A‖_∞))` bounds the spectral norm from above.
///
/// With [`tol::NS_ITERS`] iterations the result is within `1e-4` (Frobenius)
/// of [`polar_exact`] whenever `cond(A) ≤ 1e3`. Badly conditioned input
/// converges slowly in the small singular directions.
pub fn polar_newton_schulz(a: &Matrix, iters: usize) -> Result<NsPolar, LinalgError> {
    if iters == 0 {
        return Err(LinalgError::InvalidArgument(
            "Newton-Schulz needs at least one iteration".into(),
        ));
    }
    let fro = a.fro_norm();
    if fro == 0.0 {
        return Ok(NsPolar {
            matrix: Matrix::zeros(a.rows(), a.cols()),
            zero_input: true,
        });
    }
    if !fro.is_finite() {
        return Err(LinalgError::InvalidArgument(
            "Newton-Schulz input is not finite".into(),
        ));
    }
    let scale = fro.min(spectral_upper_bound(a));
    let tall = a.rows() >= a.cols();
    // Singular values stay in [0, 1] in exact arithmetic; anything well past
    // sqrt(r) means the iteration blew up.
    let bound = 2.0 * (a.min_dim() as f64).sqrt();
    let mut x = a.scaled(1.0 / scale);
    for iter in 0..iters {
        let cubic = if tall {
            let gram = x.transpose().matmul(&x)?;
            x.matmul(&gram)?
        } else {
            let gram = x.matmul(&x.transpose())?;
            gram.matmul(&x)?
        };
        x.scale_mut(1.5);
        x.axpy(-0.5, &cubic);
        let f = x.fro_norm();
        if !f.is_finite() || f > bound {
            return Err(LinalgError::Divergence { iter, fro: f });
        }
    }
    Ok(NsPolar {
        matrix: x,
        zero_input: false,
    })
}

/// `√(‖A‖₁ ‖A‖_∞)` with the induced (max column sum, max row sum) norms.
fn spectral_upper_bound(a: &Matrix) -> f64 {
    let max_col = (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let max_row = (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (max_col * max_row).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm, NormKind};
    use crate::random::{gaussian_matrix, seeded, well_conditioned_matrix};

    #[test]
    fn polar_of_diagonal_is_sign() {
        let d = Matrix::from_diag(3, 3, &[2.0, -3.0, 0.0]);
        assert_eq!(polar_exact(&d).unwrap(), Matrix::from_diag(3, 3, &[1.0, -1.0, 0.0]));
        let rect = Matrix::from_diag(2, 4, &[-0.5, 7.0]);
        assert_eq!(polar_exact(&rect).unwrap(), sign_elementwise(&rect));
        // beyond the SVD rank cutoff, still exact
        let wide = Matrix::from_diag(2, 2, &[1e8, -1e-8]);
        assert_eq!(polar_exact(&wide).unwrap(), Matrix::from_diag(2, 2, &[1.0, -1.0]));
    }

    #[test]
    fn polar_of_zero_and_rotation() {
        assert!(polar_exact(&Matrix::zeros(2, 3)).unwrap().is_zero());
        let rot = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let p = polar_exact(&rot).unwrap();
        assert!(p.sub(&rot).max_abs() < 1e-15);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(
            sign_elementwise(&Matrix::from_diag(2, 2, &[2.0, -3.0])),
            Matrix::from_diag(2, 2, &[1.0, -1.0])
        );
        assert!(sign_elementwise(&Matrix::zeros(2, 2)).is_zero());
        assert_eq!(
            sign_elementwise(&Matrix::from_rows(&[[0.5, -0.5], [0.0, 7.0]])),
            Matrix::from_rows(&[[1.0, -1.0], [0.0, 1.0]])
        );
    }

    #[test]
    fn newton_schulz_fixed_point_and_diagonal() {
        let id = Matrix::identity(2);
        for iters in [1, 3, 12] {
            let p = polar_newton_schulz(&id, iters).unwrap();
            assert_eq!(p.matrix, id);
        }
        let d = Matrix::from_diag(2, 2, &[3.0, -4.0]);
        let p = polar_newton_schulz(&d, tol::NS_ITERS).unwrap();
        let exact = polar_exact(&d).unwrap();
        assert!(p.matrix.sub(&exact).fro_norm() <= 1e-4);
    }

    #[test]
    fn newton_schulz_orthogonal_input_stays_fixed() {
        // Already-orthogonal input scaled to unit spectral norm is a fixed point.
        let rot = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let p = polar_newton_schulz(&rot.scaled(3.0), 4).unwrap();
        assert_eq!(p.matrix, rot);
    }

    #[test]
    fn newton_schulz_zero_flag_and_bad_iters() {
        let p = polar_newton_schulz(&Matrix::zeros(3, 2), 5).unwrap();
        assert!(p.zero_input && p.matrix.is_zero());
        assert!(polar_newton_schulz(&Matrix::identity(2), 0).is_err());
    }

    #[test]
    fn newton_schulz_matches_exact_on_random_8x5() {
        let mut rng = seeded(3);
        for _ in 0..20 {
            let a = well_conditioned_matrix(&mut rng, 8, 5, 1e3);
            let ns = polar_newton_schulz(&a, tol::NS_ITERS).unwrap().matrix;
            let ex = polar_exact(&a).unwrap();
            assert!(ns.sub(&ex).fro_norm() <= 1e-4);
        }
    }

    #[test]
    fn polar_duality_pairing() {
        let mut rng = seeded(8);
        for _ in 0..50 {
            let a = gaussian_matrix(&mut rng, 4, 6);
            let p = polar_exact(&a).unwrap();
            assert!(norm(&p, NormKind::Operator).unwrap() <= 1.0 + 1e-10);
            let nuc = norm(&a, NormKind::Nuclear).unwrap();
            assert!((a.dot(&p) - nuc).abs() <= 1e-8);
            assert!((p.fro_norm_sq() - 4.0).abs() <= 1e-8);
        }
    }
}
