use super::CexError;
use crate::optim::StepSchedule;

/// Default accuracy of [`compute_r`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Direct summation is used while the alternating-series remainder bound
/// `a_N` can reach the tolerance within this many terms.
const DIRECT_BUDGET: usize = 100_000;

/// `R_t = λ/2 + Σ_{s≥0} (−1)^s (λ_{t+s} − λ)` with `λ = lim λ_t`, to within
/// `tail_tol`.
///
/// Constant schedules give `λ/2`; tables are summed exactly up to their last
/// entry. For `1/(t+1)` and `1/√(t+1)` the terms are completely monotone, so
/// when direct truncation would be too slow the series is summed by the
/// Cohen–Rodriguez Villegas–Zagier acceleration, whose error is below
/// `2 a_0 / (3 + √8)^n`.
pub fn compute_r(schedule: &StepSchedule, t: usize, tail_tol: f64) -> Result<f64, CexError> {
    if !(tail_tol > 0.0 && tail_tol.is_finite()) {
        return Err(CexError::InvalidParameter(format!("tail_tol must be positive, got {tail_tol}")));
    }
    schedule.validate()?;
    if !schedule.is_nonincreasing() {
        return Err(CexError::InvalidParameter(format!(
            "R_t needs a nonincreasing offline schedule, got {}",
            schedule.name()
        )));
    }
    let limit = schedule.limit()?;
    match schedule {
        StepSchedule::Constant { lambda } => Ok(lambda / 2.0),
        StepSchedule::Table { values } => {
            let tail: f64 = values
                .iter()
                .skip(t)
                .enumerate()
                .map(|(s, v)| if s % 2 == 0 { v - limit } else { limit - v })
                .sum();
            Ok(limit / 2.0 + tail)
        }
        StepSchedule::InvT | StepSchedule::InvSqrtT => {
            let term = |s: usize| schedule.offline(t + s);
            Ok(limit / 2.0 + alternating_sum(term, tail_tol)?)
        }
        StepSchedule::AdaptiveNuclear { .. } => unreachable!("rejected as not nonincreasing"),
    }
}

/// `Σ_{s≥0} (−1)^s a_s` for a completely monotone sequence `a`.
fn alternating_sum<F>(a: F, tol: f64) -> Result<f64, CexError>
where
    F: Fn(usize) -> Result<f64, crate::optim::ScheduleError>,
{
    let a0 = a(0)?;
    if a0 == 0.0 {
        return Ok(0.0);
    }
    // Direct truncation: |remainder| ≤ a_N.
    if a(DIRECT_BUDGET)? <= tol {
        let mut sum = 0.0;
        let mut s = 0;
        loop {
            let term = a(s)?;
            if term <= tol {
                // Half the first omitted term centres the remainder interval.
                return Ok(sum + if s % 2 == 0 { term / 2.0 } else { -term / 2.0 });
            }
            sum += if s % 2 == 0 { term } else { -term };
            s += 1;
        }
    }
    let rate = 3.0 + 8f64.sqrt();
    let n = ((2.0 * a0 / tol).ln() / rate.ln()).ceil().max(1.0) as usize;
    let mut d = rate.powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut c = -d;
    let mut s = 0.0;
    for k in 0..n {
        c = b - c;
        s += c * a(k)?;
        let (kf, nf) = (k as f64, n as f64);
        b *= (kf + nf) * (kf - nf) / ((kf + 0.5) * (kf + 1.0));
    }
    Ok(s / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn constant_is_half_lambda() {
        for t in [0, 1, 100] {
            assert_eq!(compute_r(&StepSchedule::Constant { lambda: 0.2 }, t, 1e-12).unwrap(), 0.1);
        }
    }

    #[test]
    fn inverse_t_values() {
        let r0 = compute_r(&StepSchedule::InvT, 0, 1e-12).unwrap();
        assert!((r0 - LN_2).abs() < 1e-12, "{r0}");
        let r1 = compute_r(&StepSchedule::InvT, 1, 1e-12).unwrap();
        assert!((r1 - (1.0 - LN_2)).abs() < 1e-12, "{r1}");
    }

    /// `Σ (−1)^s / √(s+1) = (1 − √2) ζ(1/2)`.
    #[test]
    fn inverse_sqrt_matches_eta_half() {
        let r0 = compute_r(&StepSchedule::InvSqrtT, 0, 1e-13).unwrap();
        assert!((r0 - 0.604_898_643_421_630_4).abs() < 1e-12, "{r0}");
    }

    #[test]
    fn recursion_holds_for_every_schedule() {
        let tol = 1e-12;
        let schedules = [
            StepSchedule::Constant { lambda: 0.3 },
            StepSchedule::InvT,
            StepSchedule::InvSqrtT,
            StepSchedule::Table { values: vec![1.0, 0.8, 0.8, 0.5, 0.3, 0.25] },
        ];
        for sched in &schedules {
            for t in (0..60).chain([999, 5000]) {
                let r = compute_r(sched, t, tol).unwrap();
                let next = compute_r(sched, t + 1, tol).unwrap();
                let lambda = sched.offline(t).unwrap();
                assert!((next - (lambda - r)).abs() <= 2.0 * tol, "{} t={t}", sched.name());
                assert!(r >= sched.limit().unwrap() / 2.0 - tol);
            }
        }
    }

    /// Direct alternating partial sums bracket the accelerated value.
    #[test]
    fn accelerated_sum_is_bracketed_by_partial_sums() {
        let t = 37;
        let r = compute_r(&StepSchedule::InvSqrtT, t, 1e-12).unwrap();
        let mut partial = 0.0;
        for s in 0..20_000 {
            let term = 1.0 / ((t + s + 1) as f64).sqrt();
            let prev = partial;
            partial += if s % 2 == 0 { term } else { -term };
            if s > 1000 {
                let (lo, hi) = if prev < partial { (prev, partial) } else { (partial, prev) };
                assert!(lo - 1e-12 <= r && r <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn rejections() {
        assert!(compute_r(&StepSchedule::Table { values: vec![0.1, 0.2] }, 0, 1e-12).is_err());
        assert!(compute_r(&StepSchedule::AdaptiveNuclear { base: 1.0 }, 0, 1e-12).is_err());
        assert!(compute_r(&StepSchedule::InvT, 0, 0.0).is_err());
    }
}
