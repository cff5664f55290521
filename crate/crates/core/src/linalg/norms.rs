use super::{reduced_svd, tol, LinalgError, Matrix};

/// Scalar norms over matrices. The vector norms (`L1`, `L2`, `Linf`, `Lp`)
/// only accept `1 × d` or `d × 1` operands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L1,
    L2,
    Linf,
    Lp(f64),
    Frobenius,
    Operator,
    Nuclear,
}

pub fn norm(a: &Matrix, kind: NormKind) -> Result<f64, LinalgError> {
    let vector = |op: &'static str| -> Result<&[f64], LinalgError> {
        if a.is_vector() {
            Ok(a.as_slice())
        } else {
            Err(LinalgError::NotAVector {
                op,
                rows: a.rows(),
                cols: a.cols(),
            })
        }
    };
    match kind {
        NormKind::L1 => Ok(vector("L1 norm")?.iter().map(|x| x.abs()).sum()),
        NormKind::L2 => Ok(vector("L2 norm")?.iter().map(|x| x * x).sum::<f64>().sqrt()),
        NormKind::Linf => Ok(vector("Linf norm")?.iter().fold(0.0, |m, x| m.max(x.abs()))),
        NormKind::Lp(p) => {
            if !(p >= 1.0) || !p.is_finite() {
                return Err(LinalgError::InvalidArgument(format!(
                    "Lp norm needs p in [1, inf), got {p}"
                )));
            }
            Ok(lp_norm(vector("Lp norm")?, p))
        }
        NormKind::Frobenius => Ok(a.fro_norm()),
        NormKind::Operator => {
            let f = reduced_svd(a, tol::SVD_RANK)?;
            Ok(f.sigma.first().copied().unwrap_or(0.0))
        }
        NormKind::Nuclear => {
            let f = reduced_svd(a, tol::SVD_RANK)?;
            Ok(f.sigma.iter().sum())
        }
    }
}

/// `‖x‖_p`, rescaled by `max|x_i|` so large `p` does not overflow.
pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}
