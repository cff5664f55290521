use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::point::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("invalid schedule: {0}")]
    Invalid(String),
    #[error("stepsize at t={t} is {lambda}, must be positive and finite")]
    NonPositive { t: usize, lambda: f64 },
    #[error("the {0} schedule depends on the momentum and has no offline value")]
    NotOffline(&'static str),
    #[error("nuclear norm of the momentum failed: {0}")]
    Nuclear(String),
}

/// Stepsize sequence `λ_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Constant { lambda: f64 },
    /// `1/(t+1)`
    InvT,
    /// `1/√(t+1)`
    InvSqrtT,
    /// Explicit values; the last one repeats past the end.
    Table { values: Vec<f64> },
    /// `base · ‖M_t‖_nuc`, an adaptive rule that reads the current momentum.
    AdaptiveNuclear { base: f64 },
}

fn positive(name: &str, x: f64) -> Result<(), ScheduleError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(ScheduleError::Invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

impl StepSchedule {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match self {
            StepSchedule::Constant { lambda } => positive("lambda", *lambda),
            StepSchedule::InvT | StepSchedule::InvSqrtT => Ok(()),
            StepSchedule::Table { values } => {
                if values.is_empty() {
                    return Err(ScheduleError::Invalid("table schedule is empty".into()));
                }
                values.iter().try_for_each(|&v| positive("table entry", v))
            }
            StepSchedule::AdaptiveNuclear { base } => positive("base", *base),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StepSchedule::Constant { .. } => "constant",
            StepSchedule::InvT => "inv_t",
            StepSchedule::InvSqrtT => "inv_sqrt_t",
            StepSchedule::Table { .. } => "table",
            StepSchedule::AdaptiveNuclear { .. } => "adaptive_nuclear",
        }
    }

    pub fn is_offline(&self) -> bool {
        !matches!(self, StepSchedule::AdaptiveNuclear { .. })
    }

    /// `λ_t` for schedules that do not read the momentum.
    pub fn offline(&self, t: usize) -> Result<f64, ScheduleError> {
        let lambda = match self {
            StepSchedule::Constant { lambda } => *lambda,
            StepSchedule::InvT => 1.0 / (t as f64 + 1.0),
            StepSchedule::InvSqrtT => 1.0 / (t as f64 + 1.0).sqrt(),
            StepSchedule::Table { values } => *values
                .get(t)
                .or(values.last())
                .ok_or_else(|| ScheduleError::Invalid("table schedule is empty".into()))?,
            StepSchedule::AdaptiveNuclear { .. } => return Err(ScheduleError::NotOffline(self.name())),
        };
        check_positive(t, lambda)
    }

    /// `λ_t` given the momentum `M_t` of the step being taken.
    pub fn lambda<P: Point>(&self, t: usize, momentum: &P) -> Result<f64, ScheduleError> {
        match self {
            StepSchedule::AdaptiveNuclear { base } => {
                let nuc = momentum
                    .nuclear_sum()
                    .map_err(|e| ScheduleError::Nuclear(e.to_string()))?;
                check_positive(t, base * nuc)
            }
            _ => self.offline(t),
        }
    }

    /// `lim λ_t` for offline schedules.
    pub fn limit(&self) -> Result<f64, ScheduleError> {
        match self {
            StepSchedule::Constant { lambda } => Ok(*lambda),
            StepSchedule::InvT | StepSchedule::InvSqrtT => Ok(0.0),
            StepSchedule::Table { values } => values
                .last()
                .copied()
                .ok_or_else(|| ScheduleError::Invalid("table schedule is empty".into())),
            StepSchedule::AdaptiveNuclear { .. } => Err(ScheduleError::NotOffline(self.name())),
        }
    }

    /// Offline and `λ_{t+1} ≤ λ_t` for every `t`.
    pub fn is_nonincreasing(&self) -> bool {
        match self {
            StepSchedule::Constant { .. } | StepSchedule::InvT | StepSchedule::InvSqrtT => true,
            StepSchedule::Table { values } => values.windows(2).all(|w| w[1] <= w[0]),
            StepSchedule::AdaptiveNuclear { .. } => false,
        }
    }

    /// `λ_0, …, λ_{steps}` (length `steps + 1`).
    pub fn offline_prefix(&self, steps: usize) -> Result<Vec<f64>, ScheduleError> {
        (0..=steps).map(|t| self.offline(t)).collect()
    }
}

fn check_positive(t: usize, lambda: f64) -> Result<f64, ScheduleError> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(ScheduleError::NonPositive { t, lambda })
    }
}
