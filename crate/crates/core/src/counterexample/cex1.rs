use serde::{Deserialize, Serialize};

use super::kinky::KinkyFunction;
use super::series::compute_r;
use super::CexError;
use crate::linalg::Matrix;
use crate::optim::StepSchedule;

/// A non-convergent Muon start `diag₂(W₀) = r(1, 1) + (R₀ + δ)(1, −1)` for a
/// nonincreasing offline schedule with limit `λ`.
///
/// Requires `|δ| < R_t` for every `t`; since `R_t ≥ λ/2` and `R_t → λ/2`,
/// this is checked on `t ≤ horizon` and by `|δ| < λ/2` beyond it (`δ = 0`
/// when `λ = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cex1Init {
    pub beta: f64,
    pub schedule: StepSchedule,
    pub r: f64,
    pub delta: f64,
    pub lambda_inf: f64,
    pub r0: f64,
    pub tail_tol: f64,
}

impl Cex1Init {
    pub fn new(beta: f64, schedule: StepSchedule, r: f64, delta: f64, horizon: usize, tail_tol: f64) -> Result<Self, CexError> {
        if !(0.0..1.0).contains(&beta) {
            return Err(CexError::InvalidParameter(format!("beta must lie in [0, 1), got {beta}")));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(CexError::InvalidParameter(format!("r must be finite and >= 1, got {r}")));
        }
        if !delta.is_finite() {
            return Err(CexError::InvalidParameter(format!("delta must be finite, got {delta}")));
        }
        let r0 = compute_r(&schedule, 0, tail_tol)?;
        let lambda_inf = schedule.limit()?;
        for t in 0..=horizon {
            let rt = if t == 0 { r0 } else { compute_r(&schedule, t, tail_tol)? };
            if delta.abs() >= rt {
                return Err(CexError::Infeasible { t, delta, r_t: rt });
            }
        }
        let tail_ok = if lambda_inf > 0.0 { delta.abs() < lambda_inf / 2.0 } else { delta == 0.0 };
        if !tail_ok {
            return Err(CexError::Infeasible {
                t: horizon + 1,
                delta,
                r_t: lambda_inf / 2.0,
            });
        }
        Ok(Self {
            beta,
            schedule,
            r,
            delta,
            lambda_inf,
            r0,
            tail_tol,
        })
    }

    /// `c = (1 − β)/2`, the constant for which the construction is proven.
    pub fn proof_c(&self) -> f64 {
        (1.0 - self.beta) / 2.0
    }

    pub fn initial_diag(&self) -> [f64; 2] {
        let shift = self.r0 + self.delta;
        [self.r + shift, self.r - shift]
    }

    pub fn initial_matrix(&self, kinky: &KinkyFunction) -> Matrix {
        let [w1, w2] = self.initial_diag();
        kinky.embed(w1, w2)
    }

    /// `diag₂(W_t) = r(1, 1) + (δ + (−1)^t R_t)(1, −1)`
    pub fn predicted_iterate(&self, t: usize) -> Result<[f64; 2], CexError> {
        let rt = if t == 0 { self.r0 } else { compute_r(&self.schedule, t, self.tail_tol)? };
        let shift = self.delta + if t % 2 == 0 { rt } else { -rt };
        Ok([self.r + shift, self.r - shift])
    }

    /// `f(W_t) − inf f ≥ 2cr` along the whole run.
    pub fn floor(&self, c: f64) -> f64 {
        2.0 * c * self.r
    }
}

/// Kinky function with `c = (1 − β)/2` on `2 × 2` and the matching start.
pub fn cex1_build(
    beta: f64,
    schedule: StepSchedule,
    r: f64,
    delta: f64,
    horizon: usize,
) -> Result<(KinkyFunction, Matrix, Cex1Init), CexError> {
    let init = Cex1Init::new(beta, schedule, r, delta, horizon, super::DEFAULT_TAIL_TOL)?;
    let kinky = KinkyFunction::new(2, 2, init.proof_c())?;
    let w0 = init.initial_matrix(&kinky);
    Ok((kinky, w0, init))
}
