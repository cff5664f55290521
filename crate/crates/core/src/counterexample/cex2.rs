use super::kinky::KinkyFunction;
use super::CexError;
use crate::linalg::{sign, Matrix};
use crate::lmo::NormSpec;
use crate::optim::{run, Method, OptimizerState, StepSchedule, Trace, TraceRow};

/// `c = 1/2 − β` for `β ∈ [0, 1/2)`.
pub fn cex2_c(beta: f64) -> Result<f64, CexError> {
    if (0.0..0.5).contains(&beta) {
        Ok(0.5 - beta)
    } else {
        Err(CexError::InvalidParameter(format!("beta must lie in [0, 1/2), got {beta}")))
    }
}

/// `(p_t, q_t) = (W₁₁ + W₂₂, W₁₁ − W₂₂)` per row.
pub fn cex2_track(rows: &[TraceRow]) -> Vec<(f64, f64)> {
    rows.iter().map(|r| (r.sum_diag(), r.diff_diag())).collect()
}

/// Worst-case deviations of a trace from the invariants
/// `p_t = p₀`, `q_{t+1} = q_t − 2λ_t sign(q_t)`, `q_t ≠ 0`,
/// `f(W_t) ≥ c|p₀|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cex2Check {
    pub p0: f64,
    pub max_p_drift: f64,
    pub max_q_residual: f64,
    pub min_abs_q: f64,
    /// `min_t f(W_t) − c|p₀|`
    pub min_floor_margin: f64,
}

impl Cex2Check {
    /// Applies to traces whose step is `λ_t · polar(M_t)` or `λ_t · sign(M_t)`,
    /// so that `λ_t` in the trace is the distance moved along `(1, −1)`.
    pub fn from_trace<P>(trace: &Trace<P>, c: f64) -> Result<Self, CexError> {
        if !matches!(
            trace.method,
            Method::Muon | Method::SpecGd | Method::SignGd | Method::SignMomentum
        ) {
            return Err(CexError::InvalidParameter(format!(
                "invariant check needs a unit-step method, got {}",
                trace.method
            )));
        }
        let pq = cex2_track(&trace.rows);
        let (p0, _) = *pq.first().ok_or_else(|| CexError::InvalidParameter("empty trace".into()))?;
        let mut check = Self {
            p0,
            max_p_drift: 0.0,
            max_q_residual: 0.0,
            min_abs_q: f64::INFINITY,
            min_floor_margin: f64::INFINITY,
        };
        for (i, (row, &(p, q))) in trace.rows.iter().zip(&pq).enumerate() {
            check.max_p_drift = check.max_p_drift.max((p - p0).abs());
            check.min_abs_q = check.min_abs_q.min(q.abs());
            check.min_floor_margin = check.min_floor_margin.min(row.f - c * p0.abs());
            if let Some(&(_, q_next)) = pq.get(i + 1) {
                let residual = (q_next - q + 2.0 * row.lambda * sign(q)).abs();
                check.max_q_residual = check.max_q_residual.max(residual);
            }
        }
        Ok(check)
    }

    /// All invariants hold: `p` drift and `q` residual within `tol`, `q`
    /// never zero, and the floor met up to `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.p0 != 0.0
            && self.max_p_drift <= tol
            && self.max_q_residual <= tol
            && self.min_abs_q > 0.0
            && self.min_floor_margin >= -tol
    }
}

/// Whether `W₀` avoids the bad set over the first `horizon` steps: `p₀ ≠ 0`
/// and the run keeps `q_t ≠ 0` for `t ≤ horizon`. This is the run-time form of
/// excluding `q₀` from the countable set of reachable zero crossings.
pub fn cex2_guard_check(
    method: Method,
    beta: f64,
    schedule: StepSchedule,
    w0: &Matrix,
    horizon: usize,
) -> Result<bool, CexError> {
    let c = cex2_c(beta)?;
    let [w11, w22] = crate::point::Point::leading_diag2(w0);
    if w11 + w22 == 0.0 {
        return Ok(false);
    }
    let mut kinky = KinkyFunction::new(w0.rows(), w0.cols(), c)?;
    let mut state = OptimizerState::new(w0.clone(), beta, NormSpec::Operator, schedule)?;
    let trace = run(method, &mut kinky, &mut state, horizon)?;
    Ok(trace.rows.iter().all(|r| r.diff_diag() != 0.0))
}
