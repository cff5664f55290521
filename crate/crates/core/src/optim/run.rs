use super::oracle::SubgradientOracle;
use super::state::{Iterate, Method, OptimizerState};
use super::OptimError;

/// One row per iterate `W_t`, recorded before the step out of `W_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    /// `λ_t`
    pub lambda: f64,
    /// `f(W_t)`
    pub f: f64,
    pub w11: f64,
    pub w22: f64,
    /// `‖G_t‖_F`
    pub grad_fro: f64,
    /// `f(W̄_t)` with `W̄_t` the mean of `W_0, …, W_t`.
    pub favg: f64,
}

impl TraceRow {
    /// `p_t = W₁₁ + W₂₂`
    pub fn sum_diag(&self) -> f64 {
        self.w11 + self.w22
    }

    /// `q_t = W₁₁ − W₂₂`
    pub fn diff_diag(&self) -> f64 {
        self.w11 - self.w22
    }
}

/// Rows for `t = 0, …, T` and the final running mean `W̄_T`.
#[derive(Debug, Clone)]
pub struct Trace<P> {
    pub method: Method,
    pub rows: Vec<TraceRow>,
    pub average: P,
}

impl<P> Trace<P> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Mean of `‖G_t‖_F²` over the trace, an estimate of the oracle's
    /// second moment `σ²`.
    pub fn empirical_second_moment(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| r.grad_fro * r.grad_fro).sum::<f64>() / self.rows.len() as f64
    }
}

/// Run `steps` steps and record `steps + 1` rows. The last row reads the
/// oracle once more so that its `λ` and `‖G‖_F` columns are filled; the state
/// is left at `W_T`.
pub fn run<P, O>(method: Method, oracle: &mut O, state: &mut OptimizerState<P>, steps: usize) -> Result<Trace<P>, OptimError>
where
    P: Iterate,
    O: SubgradientOracle<P>,
{
    let mut rows = Vec::with_capacity(steps + 1);
    let mut average = state.w.clone();
    for k in 0..=steps {
        let t = state.t;
        let at = move |e: OptimError| e.at_step(t);
        if k > 0 {
            // W̄_k = W̄_{k−1} + (W_k − W̄_{k−1}) / (k + 1)
            let diff = state.w.minus(&average);
            average.axpy(1.0 / (k as f64 + 1.0), &diff);
        }
        let prepared = state.prepare(method, oracle).map_err(at)?;
        let [w11, w22] = state.w.leading_diag2();
        rows.push(TraceRow {
            t: state.t,
            lambda: prepared.lambda,
            f: oracle.value(&state.w).map_err(|e| at(e.into()))?,
            w11,
            w22,
            grad_fro: prepared.g.fro_norm(),
            favg: oracle.value(&average).map_err(|e| at(e.into()))?,
        });
        if k < steps {
            state.commit(method, prepared).map_err(at)?;
        }
    }
    Ok(Trace { method, rows, average })
}
