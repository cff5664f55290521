use std::f64::consts::LN_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::counterexample::SubgradientSelection;
use crate::lmo::NormSpec;
use crate::optim::{Method, StepSchedule};

pub const PRESETS: [&str; 2] = ["cex1-appendixE", "efm-appendixE"];

/// Which rule resolves `c = "auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `c = (1 − β)/2`
    Cex1,
    /// `c = 1/2 − β`
    Cex2,
    /// `c = (1 − β)/(2(1 + β))`
    AppendixE,
}

impl Family {
    pub fn auto_c(self, beta: f64) -> f64 {
        match self {
            Family::Cex1 => (1.0 - beta) / 2.0,
            Family::Cex2 => 0.5 - beta,
            Family::AppendixE => (1.0 - beta) / (2.0 * (1.0 + beta)),
        }
    }
}

/// `c` as written in a config file: a number or `"auto"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CSetting {
    Value(f64),
    Keyword(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    /// `diag₂(W₀) = r(1, 1) + (R₀ + δ)(1, −1)` for the run's schedule.
    Cex1 { r: f64, delta: f64 },
    /// I.i.d. `N(0, scale²)` entries from the run seed.
    Random { scale: f64 },
    /// Zero matrix with `diag₂(W₀) = values`.
    Diag { values: [f64; 2] },
    /// Full matrix, row by row.
    Matrix { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarChoice {
    Exact,
    Ns,
}

/// A config file as written: every key optional, layered over a preset.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub method: Option<Method>,
    pub beta: Option<f64>,
    pub c: Option<CSetting>,
    pub family: Option<Family>,
    pub schedule: Option<StepSchedule>,
    pub steps: Option<usize>,
    pub init: Option<InitSpec>,
    pub shape: Option<[usize; 2]>,
    pub norm: Option<NormSpec>,
    pub polar: Option<PolarChoice>,
    pub ns_iters: Option<usize>,
    pub seed: Option<u64>,
    pub noise: Option<f64>,
    pub selection: Option<SubgradientSelection>,
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(format!("config parse error: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn preset(name: &str) -> Result<Self, HarnessError> {
        let common = Self {
            beta: Some(0.9),
            c: Some(CSetting::Keyword("auto".into())),
            family: Some(Family::AppendixE),
            steps: Some(5000),
            init: Some(InitSpec::Diag {
                values: [1.0 + LN_2, 1.0 - LN_2],
            }),
            shape: Some([2, 2]),
            norm: Some(NormSpec::Operator),
            ..Self::default()
        };
        match name {
            "cex1-appendixE" => Ok(Self {
                method: Some(Method::Muon),
                schedule: Some(StepSchedule::InvT),
                output: Some("cex1-appendixE.csv".into()),
                ..common
            }),
            "efm-appendixE" => Ok(Self {
                method: Some(Method::EfMuon),
                schedule: Some(StepSchedule::InvSqrtT),
                output: Some("efm-appendixE.csv".into()),
                ..common
            }),
            other => Err(HarnessError::Config(format!(
                "unknown preset '{other}', expected one of {}",
                PRESETS.join(", ")
            ))),
        }
    }

    /// Keys set in `self` win over `base`.
    pub fn over(self, base: Self) -> Self {
        Self {
            preset: self.preset.or(base.preset),
            method: self.method.or(base.method),
            beta: self.beta.or(base.beta),
            c: self.c.or(base.c),
            family: self.family.or(base.family),
            schedule: self.schedule.or(base.schedule),
            steps: self.steps.or(base.steps),
            init: self.init.or(base.init),
            shape: self.shape.or(base.shape),
            norm: self.norm.or(base.norm),
            polar: self.polar.or(base.polar),
            ns_iters: self.ns_iters.or(base.ns_iters),
            seed: self.seed.or(base.seed),
            noise: self.noise.or(base.noise),
            selection: self.selection.or(base.selection),
            output: self.output.or(base.output),
        }
    }

    /// Layer over the named preset (argument first, then the `preset` key),
    /// fill defaults and validate.
    pub fn resolve(self, preset: Option<&str>) -> Result<ExperimentConfig, HarnessError> {
        let name = preset.map(str::to_string).or_else(|| self.preset.clone());
        let merged = match &name {
            Some(n) => self.over(Self::preset(n)?),
            None => self,
        };
        let missing = |key: &str| HarnessError::Config(format!("missing required key '{key}'"));
        let method = merged.method.ok_or_else(|| missing("method"))?;
        let beta = merged.beta.ok_or_else(|| missing("beta"))?;
        let schedule = merged.schedule.ok_or_else(|| missing("schedule"))?;
        let steps = merged.steps.ok_or_else(|| missing("steps"))?;
        let family = merged.family;
        let c = match merged.c.unwrap_or(CSetting::Keyword("auto".into())) {
            CSetting::Value(v) => v,
            CSetting::Keyword(k) if k == "auto" => family
                .ok_or_else(|| HarnessError::Config("c = \"auto\" needs a 'family' (cex1, cex2, appendix_e)".into()))?
                .auto_c(beta),
            CSetting::Keyword(k) => {
                return Err(HarnessError::Config(format!("c must be a number or \"auto\", got \"{k}\"")))
            }
        };
        let polar = merged.polar.unwrap_or(PolarChoice::Exact);
        let init = merged.init.unwrap_or(InitSpec::Random { scale: 1.0 });
        let shape = merged.shape.unwrap_or(match &init {
            InitSpec::Matrix { rows } => [rows.len(), rows.first().map_or(0, Vec::len)],
            _ => [2, 2],
        });
        let config = ExperimentConfig {
            preset: name,
            method,
            beta,
            c,
            family,
            schedule,
            steps,
            init,
            shape,
            norm: merged.norm.unwrap_or(NormSpec::Operator),
            polar,
            ns_iters: merged.ns_iters.unwrap_or(crate::linalg::tol::NS_ITERS),
            seed: merged.seed.unwrap_or(0),
            noise: merged.noise.unwrap_or(0.0),
            selection: merged.selection.unwrap_or_default(),
            output: merged.output.unwrap_or_else(|| "trace.csv".into()),
        };
        config.validate()?;
        Ok(config)
    }
}

/// A fully resolved experiment; written next to the CSV as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub method: Method,
    pub beta: f64,
    pub c: f64,
    pub family: Option<Family>,
    pub schedule: StepSchedule,
    pub steps: usize,
    pub init: InitSpec,
    pub shape: [usize; 2],
    pub norm: NormSpec,
    pub polar: PolarChoice,
    pub ns_iters: usize,
    pub seed: u64,
    pub noise: f64,
    pub selection: SubgradientSelection,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if !(0.0..1.0).contains(&self.beta) {
            return bad(format!("beta must lie in [0, 1), got {}", self.beta));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad(format!("c must lie in (0, 1), got {}", self.c));
        }
        if self.shape[0] < 2 || self.shape[1] < 2 {
            return bad(format!("shape must be at least 2x2, got {:?}", self.shape));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad(format!("noise must be finite and >= 0, got {}", self.noise));
        }
        if self.polar == PolarChoice::Ns && self.ns_iters == 0 {
            return bad("ns_iters must be positive".into());
        }
        self.schedule.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.norm.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        match &self.init {
            InitSpec::Cex1 { r, delta } if !(r.is_finite() && delta.is_finite()) => {
                bad("cex1 init needs finite r and delta".into())
            }
            InitSpec::Random { scale } if !(*scale > 0.0 && scale.is_finite()) => {
                bad(format!("random init scale must be positive, got {scale}"))
            }
            InitSpec::Diag { values } if !values.iter().all(|v| v.is_finite()) => {
                bad("diag init values must be finite".into())
            }
            InitSpec::Matrix { rows } => {
                if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
                    bad("matrix init must be a nonempty rectangular array".into())
                } else if [rows.len(), rows[0].len()] != self.shape {
                    bad(format!("matrix init is {}x{} but shape is {:?}", rows.len(), rows[0].len(), self.shape))
                } else if !rows.iter().flatten().all(|v| v.is_finite()) {
                    bad("matrix init entries must be finite".into())
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Sidecar path: the CSV path with a `.json` extension.
    pub fn sidecar_path(&self) -> PathBuf {
        self.output.with_extension("json")
    }
}
