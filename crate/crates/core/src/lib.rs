//! Non-Euclidean subgradient methods of the Muon family, LMO-induced
//! compressors with error feedback, and a counterexample engine for
//! nonsmooth convex problems.
//!
//! Module map:
//! - [`linalg`]: dense matrix kernels (SVD, polar factor, sign, norms).
//! - [`lmo`]: norm specifications, dual norms, least-Frobenius LMOs and
//!   compression operators, including the layerwise product norm.
//! - [`optim`]: step rules (spectral GD, Muon, regularized Muon, sign
//!   methods, EF-M, EF-Muon, MuonMax, EF-MuonMax), schedules, traces and the
//!   EF-M convergence bound.
//! - [`counterexample`]: the kinky test function, its subgradient oracle and
//!   closed-form predictions of non-convergent iterates.
//! - [`harness`]: experiment configs and presets, CSV traces and the property
//!   suites behind `efm verify`.

pub mod counterexample;
pub mod exec;
pub mod harness;
pub mod linalg;
pub mod lmo;
pub mod optim;
pub mod point;
pub mod random;

pub use linalg::Matrix;
pub use lmo::{NormSpec, ParamPoint, ProductNormSpec};
pub use point::Point;
