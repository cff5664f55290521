use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::oracle::SubgradientOracle;
use super::schedule::{ScheduleError, StepSchedule};
use super::OptimError;
use crate::linalg::{norm, polar_exact, polar_newton_schulz, Matrix, NormKind};
use crate::lmo::{compress, NormSpec, NormedPoint, ParamPoint};

/// How `polar(·)` is evaluated by the spectral methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarBackend {
    #[default]
    Exact,
    NewtonSchulz { iters: usize },
}

/// What the error-feedback step compresses with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compression {
    /// `𝒞 = id`: EF-M collapses to momentum SGD.
    Identity,
    /// `𝒞(P) = α² ‖P‖_* LMO(P)` under the state's norm.
    Sharp,
}

/// Step rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    /// `W −= λ polar(G)`
    SpecGd,
    /// `W −= λ polar(M)`
    Muon,
    /// `W −= λ ‖M‖_nuc polar(M)`
    RegMuon,
    /// `W −= λ sign(G)`
    SignGd,
    /// `W −= λ sign(M)`
    SignMomentum,
    /// Error feedback around a compressor.
    Efm(Compression),
    /// Error feedback with `𝒞(P) = (1/r) ‖P‖_nuc polar(P)`.
    EfMuon,
    /// `W −= λ ‖M‖_* LMO(M)` under the state's norm.
    MuonMax,
    /// Error feedback with the sharp compressor of the state's norm.
    EfMuonMax,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::SpecGd,
        Method::Muon,
        Method::RegMuon,
        Method::SignGd,
        Method::SignMomentum,
        Method::Efm(Compression::Sharp),
        Method::Efm(Compression::Identity),
        Method::EfMuon,
        Method::MuonMax,
        Method::EfMuonMax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SpecGd => "specgd",
            Method::Muon => "muon",
            Method::RegMuon => "regmuon",
            Method::SignGd => "signgd",
            Method::SignMomentum => "signmomentum",
            Method::Efm(Compression::Sharp) => "efm",
            Method::Efm(Compression::Identity) => "efm-identity",
            Method::EfMuon => "efmuon",
            Method::MuonMax => "muonmax",
            Method::EfMuonMax => "efmuonmax",
        }
    }

    /// Whether the step reads `M_t` (otherwise `M_t = G_t`).
    pub fn uses_momentum(self) -> bool {
        !matches!(self, Method::SpecGd | Method::SignGd)
    }

    pub fn uses_error_feedback(self) -> bool {
        matches!(self, Method::Efm(_) | Method::EfMuon | Method::EfMuonMax)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method '{s}', expected one of {}", names.join(", "))
            })
    }
}

impl TryFrom<String> for Method {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name().to_string()
    }
}

/// Iterates the optimizer can move. Spectral methods need a single matrix.
pub trait Iterate: NormedPoint {
    fn polar(&self, backend: PolarBackend) -> Result<Self, OptimError>;

    /// `(1/r) ‖P‖_nuc polar(P)`, `r = min(m, n)`.
    fn spectral_compress(&self, backend: PolarBackend) -> Result<Self, OptimError>;
}

impl Iterate for Matrix {
    fn polar(&self, backend: PolarBackend) -> Result<Self, OptimError> {
        Ok(match backend {
            PolarBackend::Exact => polar_exact(self)?,
            PolarBackend::NewtonSchulz { iters } => polar_newton_schulz(self, iters)?.matrix,
        })
    }

    fn spectral_compress(&self, backend: PolarBackend) -> Result<Self, OptimError> {
        let nuc = norm(self, NormKind::Nuclear)?;
        let r = self.min_dim() as f64;
        Ok(self.polar(backend)?.scaled(nuc / r))
    }
}

impl Iterate for ParamPoint {
    fn polar(&self, _: PolarBackend) -> Result<Self, OptimError> {
        Err(OptimError::Unsupported(
            "spectral methods act on a single matrix; use muonmax or efmuonmax for parameter tuples".into(),
        ))
    }

    fn spectral_compress(&self, backend: PolarBackend) -> Result<Self, OptimError> {
        self.polar(backend)
    }
}

/// Iterate, momentum and error buffers of one run.
///
/// `beta` is public so callers may change it between steps.
#[derive(Debug, Clone)]
pub struct OptimizerState<P> {
    pub w: P,
    /// `M_{t−1}`, zero before the first step.
    pub m: P,
    /// `E_t`, identically zero for methods without error feedback.
    pub e: P,
    pub t: usize,
    pub beta: f64,
    pub spec: NormSpec,
    pub schedule: StepSchedule,
    pub polar: PolarBackend,
}

/// Quantities of step `t` computed before the iterate moves.
#[derive(Debug, Clone)]
pub struct Prepared<P> {
    pub g: P,
    pub m: P,
    pub lambda: f64,
}

fn check_beta(beta: f64) -> Result<(), OptimError> {
    if (0.0..1.0).contains(&beta) {
        Ok(())
    } else {
        Err(OptimError::InvalidArgument(format!("beta must lie in [0, 1), got {beta}")))
    }
}

impl<P: Iterate> OptimizerState<P> {
    pub fn new(w0: P, beta: f64, spec: NormSpec, schedule: StepSchedule) -> Result<Self, OptimError> {
        check_beta(beta)?;
        spec.validate()?;
        schedule.validate()?;
        if !w0.is_finite() {
            return Err(OptimError::NonFinite { t: 0 });
        }
        Ok(Self {
            m: w0.zeros_like(),
            e: w0.zeros_like(),
            w: w0,
            t: 0,
            beta,
            spec,
            schedule,
            polar: PolarBackend::Exact,
        })
    }

    pub fn with_polar(mut self, polar: PolarBackend) -> Self {
        self.polar = polar;
        self
    }

    /// Draw `G_t`, form `M_t` and `λ_t` without touching the state.
    pub fn prepare<O: SubgradientOracle<P>>(&self, method: Method, oracle: &mut O) -> Result<Prepared<P>, OptimError> {
        let schedule = &self.schedule;
        self.prepare_with(method, oracle, &mut |t, m: &P| schedule.lambda(t, m))
    }

    /// [`prepare`](Self::prepare) with a caller-supplied stepsize rule
    /// `(t, M_t) ↦ λ_t` in place of the state's schedule.
    pub fn prepare_with<O, R>(&self, method: Method, oracle: &mut O, rule: &mut R) -> Result<Prepared<P>, OptimError>
    where
        O: SubgradientOracle<P>,
        R: FnMut(usize, &P) -> Result<f64, ScheduleError> + ?Sized,
    {
        check_beta(self.beta)?;
        let g = oracle.subgradient(&self.w)?;
        if !g.same_shape(&self.w) {
            return Err(super::oracle::OracleError::ShapeMismatch.into());
        }
        if !g.is_finite() {
            return Err(super::oracle::OracleError::NonFinite.into());
        }
        let m = if method.uses_momentum() {
            let mut m = self.m.scaled(self.beta);
            m.axpy(1.0 - self.beta, &g);
            m
        } else {
            g.clone()
        };
        let lambda = rule(self.t, &m)?;
        Ok(Prepared { g, m, lambda })
    }

    /// Apply a prepared step and advance `t`.
    pub fn commit(&mut self, method: Method, prepared: Prepared<P>) -> Result<(), OptimError> {
        let Prepared { m, lambda, .. } = prepared;
        match method {
            Method::SpecGd | Method::Muon => {
                let dir = m.polar(self.polar)?;
                self.w.axpy(-lambda, &dir);
            }
            Method::RegMuon => {
                let dir = m.polar(self.polar)?;
                let scale = lambda * m.nuclear_sum()?;
                self.w.axpy(-scale, &dir);
            }
            Method::SignGd | Method::SignMomentum => {
                self.w.axpy(-lambda, &m.sign());
            }
            Method::MuonMax => {
                let dir = m.lmo_min(&self.spec)?;
                let scale = lambda * m.dual_norm(&self.spec)?;
                self.w.axpy(-scale, &dir);
            }
            Method::Efm(_) | Method::EfMuon | Method::EfMuonMax => {
                let mut p = self.e.clone();
                p.axpy(lambda, &m);
                let cp = match method {
                    Method::Efm(Compression::Identity) => p.clone(),
                    Method::EfMuon => p.spectral_compress(self.polar)?,
                    _ => compress(&p, &self.spec)?,
                };
                self.w.axpy(-1.0, &cp);
                p.axpy(-1.0, &cp);
                self.e = p;
            }
        }
        self.m = m;
        self.t += 1;
        if !self.w.is_finite() {
            return Err(OptimError::NonFinite { t: self.t });
        }
        Ok(())
    }

    pub fn step<O: SubgradientOracle<P>>(&mut self, method: Method, oracle: &mut O) -> Result<(), OptimError> {
        let prepared = self.prepare(method, oracle)?;
        self.commit(method, prepared)
    }

    /// One step with a custom stepsize rule `(t, M_t) ↦ λ_t`.
    pub fn step_with<O, R>(&mut self, method: Method, oracle: &mut O, rule: &mut R) -> Result<(), OptimError>
    where
        O: SubgradientOracle<P>,
        R: FnMut(usize, &P) -> Result<f64, ScheduleError> + ?Sized,
    {
        let prepared = self.prepare_with(method, oracle, rule)?;
        self.commit(method, prepared)
    }
}
