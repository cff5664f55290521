//! The kinky test function `c|W₁₁+W₂₂| + |W₁₁−W₂₂|`, its subgradient
//! oracle, and closed-form descriptions of the Muon iterates that never reach
//! its minimizers.

mod cex1;
mod cex2;
mod kinky;
mod series;

pub use cex1::{cex1_build, Cex1Init};
pub use cex2::{cex2_c, cex2_guard_check, cex2_track, Cex2Check};
pub use kinky::{f_diag_value, lipschitz_bound, KinkyFunction, SubgradientSelection};
pub use series::{compute_r, DEFAULT_TAIL_TOL};

use thiserror::Error;

use crate::optim::{OptimError, ScheduleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CexError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("infeasible offset: |delta| = {} is not below R_{t} = {r_t}", delta.abs())]
    Infeasible { t: usize, delta: f64, r_t: f64 },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Optim(#[from] OptimError),
}
