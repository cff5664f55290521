use std::fs;

use super::config::{ExperimentConfig, InitSpec, PolarChoice};
use super::csv::write_csv;
use super::HarnessError;
use crate::counterexample::{lipschitz_bound, Cex1Init, KinkyFunction, DEFAULT_TAIL_TOL};
use crate::linalg::Matrix;
use crate::lmo::{NormSpec, NormedPoint, ParamPoint, ProductNormSpec};
use crate::optim::{
    efm_bound, efm_bound_prefixes, run, Compression, Iterate, Method, NoisyOracle, OptimizerState, PolarBackend,
    StepSchedule, SubgradientOracle, Trace, TraceRow,
};
use crate::point::Point;
use crate::random::{gaussian_matrix, trial_rng};

/// Stream of the run seed used for the random start.
const INIT_STREAM: u64 = 0;
/// Stream of the run seed used for oracle noise.
const NOISE_STREAM: u64 = 1;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub rows: Vec<TraceRow>,
    /// Per-row EF-M bound; empty when it does not apply to the run.
    pub bound: Vec<Option<f64>>,
}

fn diag_start(cfg: &ExperimentConfig) -> Result<Option<[f64; 2]>, HarnessError> {
    Ok(match &cfg.init {
        InitSpec::Cex1 { r, delta } => Some(
            Cex1Init::new(cfg.beta, cfg.schedule.clone(), *r, *delta, cfg.steps, DEFAULT_TAIL_TOL)?.initial_diag(),
        ),
        InitSpec::Diag { values } => Some(*values),
        _ => None,
    })
}

/// `W₀` on the configured shape.
pub fn initial_matrix(cfg: &ExperimentConfig) -> Result<Matrix, HarnessError> {
    let [rows, cols] = cfg.shape;
    if let Some([w1, w2]) = diag_start(cfg)? {
        return Ok(KinkyFunction::new(rows, cols, cfg.c)?.embed(w1, w2));
    }
    match &cfg.init {
        InitSpec::Random { scale } => Ok(gaussian_matrix(&mut trial_rng(cfg.seed, INIT_STREAM), rows, cols).scaled(*scale)),
        InitSpec::Matrix { rows } => Ok(Matrix::from_rows(rows)),
        _ => unreachable!("diagonal starts handled above"),
    }
}

fn initial_param_point(cfg: &ExperimentConfig, spec: &ProductNormSpec) -> Result<ParamPoint, HarnessError> {
    let (rows, cols) = spec.layer_dims[0];
    let mut w = ParamPoint::zeros(spec);
    if let Some([w1, w2]) = diag_start(cfg)? {
        w.matrices[0] = KinkyFunction::new(rows, cols, cfg.c)?.embed(w1, w2);
        return Ok(w);
    }
    match &cfg.init {
        InitSpec::Random { scale } => {
            let mut rng = trial_rng(cfg.seed, INIT_STREAM);
            Ok(ParamPoint::gaussian(spec, &mut rng).scaled(*scale))
        }
        InitSpec::Matrix { rows: entries } => {
            let m = Matrix::from_rows(entries);
            if m.shape() != (rows, cols) {
                return Err(HarnessError::Config(format!(
                    "matrix init is {}x{} but the first product layer is {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
            w.matrices[0] = m;
            Ok(w)
        }
        _ => unreachable!("diagonal starts handled above"),
    }
}

/// Compression quality `δ` of the method's compressor at `W₀`'s shape, for
/// methods with error feedback.
fn ef_delta<P: NormedPoint>(method: Method, w0: &P, norm: &NormSpec, min_dim: usize) -> Result<Option<f64>, HarnessError> {
    let lmo = |e: crate::lmo::LmoError| HarnessError::Config(e.to_string());
    Ok(match method {
        Method::Efm(Compression::Identity) => Some(1.0),
        Method::EfMuon => Some(1.0 / min_dim as f64),
        Method::Efm(Compression::Sharp) | Method::EfMuonMax => Some(w0.compressor_constants(norm).map_err(lmo)?.delta),
        _ => None,
    })
}

/// The EF-M bound for `T = 0, …, steps`, taking `inf f = 0` and the Lipschitz
/// constant of the kinky function plus the oracle noise as `σ`.
pub fn bound_column(
    schedule: &StepSchedule,
    steps: usize,
    delta: f64,
    beta: f64,
    sigma: f64,
    dist0: f64,
) -> Result<Vec<f64>, HarnessError> {
    let err = |e: crate::optim::BoundError| HarnessError::Config(e.to_string());
    match schedule {
        StepSchedule::InvSqrtT => (0..=steps).map(|t| efm_bound(t, delta, beta, sigma, dist0).map_err(err)).collect(),
        _ => {
            let lambdas = schedule.offline_prefix(steps).map_err(|e| HarnessError::Config(e.to_string()))?;
            efm_bound_prefixes(&lambdas, delta, beta, sigma, dist0).map_err(err)
        }
    }
}

fn drive<P, O>(cfg: &ExperimentConfig, w0: P, oracle: &mut O) -> Result<Trace<P>, HarnessError>
where
    P: Iterate,
    O: SubgradientOracle<P>,
{
    let polar = match cfg.polar {
        PolarChoice::Exact => PolarBackend::Exact,
        PolarChoice::Ns => PolarBackend::NewtonSchulz { iters: cfg.ns_iters },
    };
    let mut state = OptimizerState::new(w0, cfg.beta, cfg.norm.clone(), cfg.schedule.clone())?.with_polar(polar);
    Ok(run(cfg.method, oracle, &mut state, cfg.steps)?)
}

/// Run the configured experiment in memory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let (rows, delta, diag0) = match &cfg.norm {
        NormSpec::Product(spec) => {
            if cfg.noise > 0.0 {
                return Err(HarnessError::Config("oracle noise is only supported for matrix iterates".into()));
            }
            let w0 = initial_param_point(cfg, spec)?;
            let (m, n) = spec.layer_dims[0];
            let mut kinky = KinkyFunction::new(m, n, cfg.c)?.with_selection(cfg.selection)?;
            let delta = ef_delta(cfg.method, &w0, &cfg.norm, m.min(n))?;
            let diag0 = w0.leading_diag2();
            (drive(cfg, w0, &mut kinky)?.rows, delta, diag0)
        }
        _ => {
            let w0 = initial_matrix(cfg)?;
            let [m, n] = cfg.shape;
            let kinky = KinkyFunction::new(m, n, cfg.c)?.with_selection(cfg.selection)?;
            let delta = ef_delta(cfg.method, &w0, &cfg.norm, m.min(n))?;
            let diag0 = w0.leading_diag2();
            let trace = if cfg.noise > 0.0 {
                let mut noisy = NoisyOracle::new(kinky, cfg.noise, trial_rng(cfg.seed, NOISE_STREAM))
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                drive(cfg, w0, &mut noisy)?
            } else {
                let mut kinky = kinky;
                drive(cfg, w0, &mut kinky)?
            };
            (trace.rows, delta, diag0)
        }
    };
    let bound = match delta {
        Some(delta) if cfg.schedule.is_nonincreasing() => {
            let lip = lipschitz_bound(cfg.c)?;
            let sigma = (lip * lip + cfg.noise * cfg.noise).sqrt();
            // nearest minimizer: zero out the leading 2×2 diagonal
            let dist0 = diag0[0].hypot(diag0[1]);
            bound_column(&cfg.schedule, cfg.steps, delta, cfg.beta, sigma, dist0)?
                .into_iter()
                .map(Some)
                .collect()
        }
        _ => Vec::new(),
    };
    Ok(RunOutput {
        config: cfg.clone(),
        rows,
        bound,
    })
}

/// Run, then write the CSV to `cfg.output` and the resolved config next to it.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<RunOutput, HarnessError> {
    let out = run_experiment(cfg)?;
    if let Some(dir) = cfg.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &out.rows, &out.bound)?;
    fs::write(&cfg.output, buf)?;
    let json = serde_json::to_string_pretty(cfg).map_err(|e| HarnessError::Io(e.to_string()))?;
    fs::write(cfg.sidecar_path(), json + "\n")?;
    Ok(out)
}
