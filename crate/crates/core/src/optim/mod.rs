//! Step rules, stepsize schedules, subgradient oracles, trace recording and
//! the EF-M convergence bound.
//!
//! Every method shares one momentum recursion `M_t = βM_{t−1} + (1−β)G_t`
//! with `M_{−1} = 0`; methods without momentum use `M_t = G_t`. A step is
//! split into [`OptimizerState::prepare`] (oracle call, momentum, `λ_t`) and
//! [`OptimizerState::commit`] (the update), so traces can report the quantities
//! of the last iterate without moving it.

mod bound;
mod oracle;
mod run;
mod schedule;
mod state;

pub use bound::{efm_bound, efm_bound_general, efm_bound_prefixes, BoundError};
pub use oracle::{DiagonalAbsOracle, FnOracle, NoisyOracle, OracleError, SubgradientOracle};
pub use run::{run, Trace, TraceRow};
pub use schedule::{ScheduleError, StepSchedule};
pub use state::{Compression, Iterate, Method, OptimizerState, PolarBackend, Prepared};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::lmo::LmoError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Lmo(#[from] LmoError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("iterate became non-finite at t={t}")]
    NonFinite { t: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("step {t}: {source}")]
    AtStep { t: usize, source: Box<OptimError> },
}

impl OptimError {
    pub fn at_step(self, t: usize) -> Self {
        match self {
            OptimError::AtStep { .. } => self,
            other => OptimError::AtStep { t, source: Box::new(other) },
        }
    }

    /// The error with any step context removed.
    pub fn root(&self) -> &OptimError {
        match self {
            OptimError::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// Divergence, non-convergence or non-finite values, as opposed to a bad
    /// configuration.
    pub fn is_numerical(&self) -> bool {
        match self.root() {
            OptimError::NonFinite { .. } | OptimError::Oracle(OracleError::NonFinite) => true,
            OptimError::Schedule(ScheduleError::NonPositive { .. }) => true,
            OptimError::Linalg(e) => e.is_numerical(),
            OptimError::Lmo(LmoError::Linalg(e)) => e.is_numerical(),
            _ => false,
        }
    }
}
