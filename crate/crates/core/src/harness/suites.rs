use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::config::{ConfigFile, ExperimentConfig, InitSpec, PolarChoice};
use super::experiment::run_experiment;
use super::HarnessError;
use crate::counterexample::{cex1_build, cex2_c, Cex1Init, Cex2Check, KinkyFunction, DEFAULT_TAIL_TOL};
use crate::exec::Execution;
use crate::linalg::{norm, polar_exact, polar_newton_schulz, sign_elementwise, tol, Matrix, NormKind};
use crate::lmo::{compress, dual_norm, lmo_min, primal_norm, NormSpec, NormedPoint, ParamPoint, ProductNormSpec};
use crate::optim::{run, Compression, DiagonalAbsOracle, Method, OptimizerState, StepSchedule};
use crate::random::{gaussian, gaussian_matrix, gaussian_vec, random_orthogonal, trial_rng, well_conditioned_matrix, Rng64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Reduction,
    Compressor,
    Lmo,
    Cex1,
    Cex2,
    EfBound,
    Polar,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Reduction,
        Suite::Compressor,
        Suite::Lmo,
        Suite::Cex1,
        Suite::Cex2,
        Suite::EfBound,
        Suite::Polar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reduction => "reduction",
            Suite::Compressor => "compressor",
            Suite::Lmo => "lmo",
            Suite::Cex1 => "cex1",
            Suite::Cex2 => "cex2",
            Suite::EfBound => "ef-bound",
            Suite::Polar => "polar",
        }
    }

    /// Trials (inputs, inits or runs) used when none are requested.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Reduction => 50,
            Suite::Compressor | Suite::Lmo => 1000,
            Suite::Cex1 => 1,
            Suite::Cex2 => 100,
            Suite::EfBound => 24,
            Suite::Polar => 500,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            HarnessError::Config(format!("unknown suite '{s}', expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub trials: Option<usize>,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            trials: None,
            seed: 20240917,
            exec: Execution::default(),
        }
    }
}

impl SuiteOptions {
    fn trials(&self, suite: Suite) -> usize {
        self.trials.unwrap_or_else(|| suite.default_trials()).max(1)
    }
}

/// One property with its observed value and the required limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub relation: &'static str,
    pub required: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, required: f64) -> Self {
        Self::new(name, observed, "<=", required, observed <= required)
    }

    pub fn at_least(name: impl Into<String>, observed: f64, required: f64) -> Self {
        Self::new(name, observed, ">=", required, observed >= required)
    }

    pub fn below(name: impl Into<String>, observed: f64, required: f64) -> Self {
        Self::new(name, observed, "<", required, observed < required)
    }

    pub fn above(name: impl Into<String>, observed: f64, required: f64) -> Self {
        Self::new(name, observed, ">", required, observed > required)
    }

    /// `passed` out of `total` trials, all required.
    pub fn all_of(name: impl Into<String>, passed: usize, total: usize) -> Self {
        Self::new(name, passed as f64, "==", total as f64, passed == total)
    }

    fn new(name: impl Into<String>, observed: f64, relation: &'static str, required: f64, passed: bool) -> Self {
        // NaN observations compare false above and fail here too
        Self {
            name: name.into(),
            observed,
            relation,
            required,
            passed: passed && !observed.is_nan(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict}  {}: observed {:.6e} {} required {:.6e}",
            self.name, self.observed, self.relation, self.required
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{}: {} checks, {failed} failed",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.checks.len()
        )
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport, HarnessError> {
    let checks = match suite {
        Suite::Reduction => reduction(opts)?,
        Suite::Compressor => compressor(opts)?,
        Suite::Lmo => lmo(opts)?,
        Suite::Cex1 => cex1(opts)?,
        Suite::Cex2 => cex2(opts)?,
        Suite::EfBound => ef_bound(opts)?,
        Suite::Polar => polar(opts)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn lmo_err(e: crate::lmo::LmoError) -> HarnessError {
    HarnessError::Numerical(e.to_string())
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn random_schedule(rng: &mut Rng64) -> StepSchedule {
    match rng.random_range(0..3) {
        0 => StepSchedule::Constant {
            lambda: rng.random_range(0.01..0.3),
        },
        1 => StepSchedule::InvT,
        _ => StepSchedule::InvSqrtT,
    }
}

/// Muon on a diagonal oracle against the signed momentum method on the
/// diagonal itself: the matrix iterate stays diagonal and its diagonal equals
/// the vector iterate.
fn reduction(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    const STEPS: usize = 100;
    let trials = opts.trials(Suite::Reduction);
    let deviations = opts.exec.try_map(trials, |i| -> Result<f64, HarnessError> {
        let mut rng = trial_rng(opts.seed, i as u64);
        let dim = rng.random_range(2..=5);
        let terms = (0..rng.random_range(1..=4))
            .map(|_| (gaussian_vec(&mut rng, dim), gaussian(&mut rng)))
            .collect();
        let mut oracle = DiagonalAbsOracle::new(terms).map_err(|e| HarnessError::Config(e.to_string()))?;
        let beta = rng.random_range(0.0..0.95);
        let schedule = random_schedule(&mut rng);
        let diag = gaussian_vec(&mut rng, dim);
        let mut mat = OptimizerState::new(Matrix::from_diag(dim, dim, &diag), beta, NormSpec::Operator, schedule.clone())?;
        let mut vec = OptimizerState::new(Matrix::column(&diag), beta, NormSpec::Linf, schedule)?;
        let mut worst: f64 = 0.0;
        for _ in 0..STEPS {
            mat.step(Method::Muon, &mut oracle)?;
            vec.step(Method::SignMomentum, &mut oracle)?;
            let expected = Matrix::from_diag(dim, dim, vec.w.as_slice());
            worst = worst.max(mat.w.sub(&expected).max_abs());
        }
        Ok(worst)
    })?;
    Ok(vec![Check::at_most(
        format!("muon equals signed momentum on diagonal oracles ({trials} trials x {STEPS} steps, max |diff|)"),
        max_of(deviations),
        1e-12,
    )])
}

/// Vector specs act on columns, matrix specs on general rectangles.
fn dense_specs() -> Vec<NormSpec> {
    vec![
        NormSpec::L1,
        NormSpec::L2,
        NormSpec::Linf,
        NormSpec::Lp(1.5),
        NormSpec::Lp(3.0),
        NormSpec::Operator,
        NormSpec::Nuclear,
    ]
}

/// Gaussian input, rank one or sparse, chosen by trial index.
fn dense_input(spec: &NormSpec, rng: &mut Rng64, i: usize) -> Matrix {
    let (rows, cols) = match spec {
        NormSpec::Operator | NormSpec::Nuclear => (rng.random_range(1..=6), rng.random_range(1..=6)),
        _ => (rng.random_range(1..=12), 1),
    };
    let mut w = gaussian_matrix(rng, rows, cols);
    match i % 3 {
        1 if cols > 1 => {
            let u = gaussian_matrix(rng, rows, 1);
            let v = gaussian_matrix(rng, 1, cols);
            w = u.matmul(&v).expect("outer product shapes");
        }
        1 | 2 => {
            for x in w.as_mut_slice() {
                if rng.random_bool(0.4) {
                    *x = 0.0;
                }
            }
        }
        _ => {}
    }
    w
}

fn random_product_spec(rng: &mut Rng64) -> ProductNormSpec {
    let layers = rng.random_range(1..=3);
    let dims = (0..layers)
        .map(|_| (rng.random_range(1..=5), rng.random_range(1..=5)))
        .collect();
    ProductNormSpec::new(dims, rng.random_range(0.5..4.0), rng.random_range(1..=4)).expect("valid random spec")
}

/// `‖W − 𝒞(W)‖_F² − (1 − δ)‖W‖_F²` and the proof-line slack
/// `‖W − 𝒞(W)‖_F² − (‖W‖_F² − α²‖W‖_*²)`.
fn contraction_excess<P: NormedPoint>(w: &P, spec: &NormSpec) -> Result<(f64, f64), HarnessError> {
    let consts = w.compressor_constants(spec).map_err(lmo_err)?;
    let residual = w.minus(&compress(w, spec).map_err(lmo_err)?).fro_norm_sq();
    let dual = dual_norm(w, spec).map_err(lmo_err)?;
    let w2 = w.fro_norm_sq();
    Ok((residual - (1.0 - consts.delta) * w2, residual - (w2 - consts.alpha_sq * dual * dual)))
}

fn compressor(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let trials = opts.trials(Suite::Compressor);
    let mut checks = Vec::new();
    for (s, spec) in dense_specs().into_iter().enumerate() {
        let excess = opts.exec.try_map(trials, |i| {
            let mut rng = trial_rng(opts.seed ^ ((s as u64 + 1) << 32), i as u64);
            contraction_excess(&dense_input(&spec, &mut rng, i), &spec).map(|e| e.0)
        })?;
        checks.push(Check::at_most(
            format!("{}: ||W-C(W)||^2 - (1-delta)||W||^2 over {trials} inputs", spec.name()),
            max_of(excess),
            1e-8,
        ));
    }
    let excess = opts.exec.try_map(trials, |i| {
        let mut rng = trial_rng(opts.seed ^ (0xC0 << 32), i as u64);
        let spec = random_product_spec(&mut rng);
        let w = ParamPoint::gaussian(&spec, &mut rng);
        contraction_excess(&w, &NormSpec::Product(spec))
    })?;
    checks.push(Check::at_most(
        format!("product: ||W-C(W)||^2 - (||W||^2 - alpha^2 ||W||_*^2) over {trials} inputs"),
        max_of(excess.iter().map(|e| e.1)),
        1e-8,
    ));
    checks.push(Check::at_most(
        format!("product: ||W-C(W)||^2 - (1-delta)||W||^2 over {trials} inputs"),
        max_of(excess.iter().map(|e| e.0)),
        1e-8,
    ));
    Ok(checks)
}

#[derive(Debug, Clone, Copy)]
struct LmoProbe {
    pairing_err: f64,
    primal: f64,
    /// `⟨X, W⟩ − ‖W‖_*` for a random unit-norm `X`
    feasible_gap: f64,
}

fn probe_lmo<P: NormedPoint>(w: &P, probe: &P, spec: &NormSpec) -> Result<LmoProbe, HarnessError> {
    let x = lmo_min(w, spec).map_err(lmo_err)?;
    let dual = dual_norm(w, spec).map_err(lmo_err)?;
    let scale = primal_norm(probe, spec).map_err(lmo_err)?;
    let feasible_gap = if scale > 0.0 { probe.dot(w) / scale - dual } else { -dual };
    Ok(LmoProbe {
        pairing_err: (x.dot(w) - dual).abs(),
        primal: primal_norm(&x, spec).map_err(lmo_err)?,
        feasible_gap,
    })
}

fn lmo_checks(label: &str, trials: usize, probes: &[LmoProbe]) -> Vec<Check> {
    vec![
        Check::at_most(
            format!("{label}: |<LMO(W),W> - ||W||_*| over {trials} inputs"),
            max_of(probes.iter().map(|p| p.pairing_err)),
            1e-8,
        ),
        Check::at_most(
            format!("{label}: ||LMO(W)|| over {trials} inputs"),
            max_of(probes.iter().map(|p| p.primal)),
            1.0 + 1e-10,
        ),
        Check::at_most(
            format!("{label}: <X,W> - ||W||_* for random unit X"),
            max_of(probes.iter().map(|p| p.feasible_gap)),
            1e-10,
        ),
    ]
}

fn lmo(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let trials = opts.trials(Suite::Lmo);
    let mut checks = Vec::new();
    for (s, spec) in dense_specs().into_iter().enumerate() {
        let probes = opts.exec.try_map(trials, |i| {
            let mut rng = trial_rng(opts.seed ^ ((s as u64 + 11) << 32), i as u64);
            let w = dense_input(&spec, &mut rng, i);
            let probe = gaussian_matrix(&mut rng, w.rows(), w.cols());
            probe_lmo(&w, &probe, &spec)
        })?;
        checks.extend(lmo_checks(&spec.name(), trials, &probes));
    }
    let probes = opts.exec.try_map(trials, |i| {
        let mut rng = trial_rng(opts.seed ^ (0x1F0 << 32), i as u64);
        let spec = random_product_spec(&mut rng);
        let w = ParamPoint::gaussian(&spec, &mut rng);
        let probe = ParamPoint::gaussian(&spec, &mut rng);
        probe_lmo(&w, &probe, &NormSpec::Product(spec))
    })?;
    checks.extend(lmo_checks("product", trials, &probes));

    let cases = (trials / 50).max(4);
    let brute = opts.exec.try_map(cases, |i| least_norm_brute_force(opts.seed, i))?;
    checks.push(Check::at_least(
        format!("operator: ||X||_F - ||LMO(W)||_F over grid maximizers, {cases} rank-deficient 3x3 cases"),
        min_of(brute.iter().map(|b| b.0)),
        -1e-12,
    ));
    checks.push(Check::at_most(
        "operator: | ||LMO(W)||_F^2 - rank(W) | on the same cases",
        max_of(brute.iter().map(|b| b.1)),
        1e-10,
    ));
    checks.push(Check::at_most(
        "operator: |<X,W> - ||W||_nuc| over the grid maximizers",
        max_of(brute.iter().map(|b| b.2)),
        1e-10,
    ));
    Ok(checks)
}

/// Every operator-norm maximizer of `⟨·, W⟩` for `W = U_r Σ V_rᵀ` is
/// `U_r V_rᵀ + U_⊥ Z V_⊥ᵀ` with `‖Z‖_op ≤ 1`. Sweeps `Z` over a grid and
/// returns the smallest Frobenius excess over the LMO, the LMO's distance
/// from `‖·‖_F² = rank`, and the worst pairing error among grid points.
fn least_norm_brute_force(seed: u64, case: usize) -> Result<(f64, f64, f64), HarnessError> {
    let mut rng = trial_rng(seed ^ (0xB7 << 32), case as u64);
    let rank = 1 + case % 2;
    let q1 = random_orthogonal(&mut rng, 3);
    let q2 = random_orthogonal(&mut rng, 3);
    let sigma: Vec<f64> = (0..rank).map(|_| rng.random_range(0.5..2.0)).collect();
    let w = crate::random::with_singular_values(&q1, &sigma, &q2);
    let x = lmo_min(&w, &NormSpec::Operator).map_err(lmo_err)?;
    let nuc: f64 = sigma.iter().sum();
    let null = 3 - rank;
    let grid: Vec<f64> = match null {
        1 => (0..=40).map(|k| -1.0 + k as f64 / 20.0).collect(),
        _ => (0..=8).map(|k| -1.0 + k as f64 / 4.0).collect(),
    };
    let mut min_excess = f64::INFINITY;
    let mut max_pair: f64 = 0.0;
    let cells = grid.len().pow((null * null) as u32);
    for idx in 0..cells {
        let mut z = Matrix::zeros(null, null);
        let mut rest = idx;
        for e in z.as_mut_slice() {
            *e = grid[rest % grid.len()];
            rest /= grid.len();
        }
        if norm(&z, NormKind::Operator)? > 1.0 {
            continue;
        }
        let mut cand = x.clone();
        for a in 0..null {
            for b in 0..null {
                for i in 0..3 {
                    for j in 0..3 {
                        cand[(i, j)] += z[(a, b)] * q1[(i, rank + a)] * q2[(j, rank + b)];
                    }
                }
            }
        }
        min_excess = min_excess.min(cand.fro_norm() - x.fro_norm());
        max_pair = max_pair.max((cand.dot(&w) - nuc).abs());
    }
    Ok((min_excess, (x.fro_norm_sq() - rank as f64).abs(), max_pair))
}

fn cex1(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    const HORIZON: usize = 5000;
    let mut checks = Vec::new();

    let preset = ConfigFile::default().resolve(Some("cex1-appendixE"))?;
    let beta = preset.beta;
    let out = run_experiment(&preset)?;
    let init = Cex1Init::new(beta, preset.schedule.clone(), 1.0, 0.0, HORIZON, DEFAULT_TAIL_TOL)?;
    let mut closed_form: f64 = 0.0;
    for r in &out.rows {
        let [a, b] = init.predicted_iterate(r.t)?;
        closed_form = closed_form.max((a - r.w11).abs()).max((b - r.w22).abs());
    }
    checks.push(Check::at_most(
        "preset: max |sum_diag - 2|",
        max_of(out.rows.iter().map(|r| (r.sum_diag() - 2.0).abs())),
        1e-10,
    ));
    checks.push(Check::at_least(
        "preset: min f(W_t)",
        min_of(out.rows.iter().map(|r| r.f)),
        (1.0 - beta) / (1.0 + beta),
    ));
    checks.push(Check::at_most("preset: max closed-form deviation", closed_form, 1e-10));

    let grid: Vec<(f64, StepSchedule)> = [0.0, 0.5, 0.9]
        .into_iter()
        .flat_map(|b| [(b, StepSchedule::Constant { lambda: 0.2 }), (b, StepSchedule::InvT)])
        .collect();
    let margins = opts.exec.try_map(grid.len(), |i| -> Result<(f64, f64), HarnessError> {
        let (beta, schedule) = grid[i].clone();
        let (mut kinky, w0, init) = cex1_build(beta, schedule.clone(), 1.0, 0.0, HORIZON)?;
        let mut state = OptimizerState::new(w0, beta, NormSpec::Operator, schedule)?;
        let trace = run(Method::Muon, &mut kinky, &mut state, HORIZON)?;
        let floor = init.floor(kinky.c());
        let mut dev: f64 = 0.0;
        for r in &trace.rows {
            let [a, b] = init.predicted_iterate(r.t)?;
            dev = dev.max((a - r.w11).abs()).max((b - r.w22).abs());
        }
        Ok((min_of(trace.rows.iter().map(|r| r.f - floor)), dev))
    })?;
    for ((beta, schedule), (margin, dev)) in grid.iter().zip(margins) {
        checks.push(Check::at_least(
            format!("beta={beta} {}: min f(W_t) - (1-beta)r", schedule.name()),
            margin,
            0.0,
        ));
        checks.push(Check::at_most(
            format!("beta={beta} {}: max closed-form deviation", schedule.name()),
            dev,
            1e-10,
        ));
    }
    Ok(checks)
}

/// The regularized method `W −= λ‖M‖_nuc polar(M)` runs as Muon with the
/// adaptive schedule `λ_t = λ‖M_t‖_nuc`, so the trace records the actual
/// displacement.
fn cex2(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    const HORIZON: usize = 2000;
    const TOL: f64 = 1e-12;
    let trials = opts.trials(Suite::Cex2);
    let mut checks = Vec::new();
    for (b, beta) in [0.0, 0.2, 0.4].into_iter().enumerate() {
        let c = cex2_c(beta)?;
        for (k, kind) in ["adaptive_nuclear", "table"].into_iter().enumerate() {
            let results = opts.exec.try_map(trials, |i| -> Result<Cex2Check, HarnessError> {
                let mut rng = trial_rng(opts.seed ^ (((b * 2 + k) as u64 + 0x2C) << 32), i as u64);
                let w0 = gaussian_matrix(&mut rng, 2, 2);
                let schedule = match kind {
                    "table" => StepSchedule::Table {
                        values: (0..=HORIZON).map(|_| rng.random_range(1e-3..0.2)).collect(),
                    },
                    _ => StepSchedule::AdaptiveNuclear {
                        base: rng.random_range(0.01..0.2),
                    },
                };
                let mut kinky = KinkyFunction::new(2, 2, c)?;
                let mut state = OptimizerState::new(w0, beta, NormSpec::Operator, schedule)?;
                let trace = run(Method::Muon, &mut kinky, &mut state, HORIZON)?;
                Ok(Cex2Check::from_trace(&trace, c)?)
            })?;
            let label = format!("beta={beta} {kind}");
            let ok = results.iter().filter(|r| r.passes(TOL)).count();
            checks.push(Check::all_of(format!("{label}: runs keeping every invariant"), ok, trials));
            checks.push(Check::at_most(
                format!("{label}: max |p_t - p_0|"),
                max_of(results.iter().map(|r| r.max_p_drift)),
                TOL,
            ));
            checks.push(Check::above(
                format!("{label}: min |q_t|"),
                min_of(results.iter().map(|r| r.min_abs_q)),
                0.0,
            ));
            checks.push(Check::at_least(
                format!("{label}: min f(W_t) - c|p_0|"),
                min_of(results.iter().map(|r| r.min_floor_margin)),
                -TOL,
            ));
        }
    }
    // the adaptive schedule reproduces the regularized method step for step
    let beta = 0.2;
    let c = cex2_c(beta)?;
    let gaps = opts.exec.try_map(trials.min(10), |i| -> Result<f64, HarnessError> {
        let mut rng = trial_rng(opts.seed ^ (0x2D << 32), i as u64);
        let w0 = gaussian_matrix(&mut rng, 2, 2);
        let base = rng.random_range(0.01..0.2);
        let mut kinky = KinkyFunction::new(2, 2, c)?;
        let mut a = OptimizerState::new(w0.clone(), beta, NormSpec::Operator, StepSchedule::AdaptiveNuclear { base })?;
        let mut r = OptimizerState::new(w0, beta, NormSpec::Operator, StepSchedule::Constant { lambda: base })?;
        let mut gap: f64 = 0.0;
        for _ in 0..200 {
            a.step(Method::Muon, &mut kinky)?;
            r.step(Method::RegMuon, &mut kinky)?;
            gap = gap.max(a.w.sub(&r.w).max_abs());
        }
        Ok(gap)
    })?;
    checks.push(Check::at_most("muon with adaptive schedule vs regmuon, max |diff|", max_of(gaps), TOL));
    Ok(checks)
}

fn ef_bound(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let mut checks = Vec::new();
    let preset = ConfigFile::default().resolve(Some("efm-appendixE"))?;
    let out = run_experiment(&preset)?;
    let last = out.rows.last().map_or(f64::NAN, |r| r.f);
    checks.push(Check::below("preset: f(W_T)", last, 0.05));
    checks.push(Check::at_most(
        "preset: max_T f(avg W_T) - bound_T",
        max_excess(&out),
        0.0,
    ));

    let trials = opts.trials(Suite::EfBound);
    let methods = [Method::EfMuon, Method::Efm(Compression::Identity), Method::EfMuonMax];
    let excess = opts.exec.try_map(trials, |i| -> Result<f64, HarnessError> {
        let mut rng = trial_rng(opts.seed ^ (0xEF << 32), i as u64);
        let rows = rng.random_range(2..=4);
        let cols = rng.random_range(2..=4);
        let cfg = ExperimentConfig {
            preset: None,
            method: methods[i % methods.len()],
            beta: rng.random_range(0.0..0.95),
            c: rng.random_range(0.05..0.95),
            family: None,
            schedule: if i % 2 == 0 {
                StepSchedule::InvSqrtT
            } else {
                StepSchedule::Constant {
                    lambda: rng.random_range(0.01..0.1),
                }
            },
            steps: 1000,
            init: InitSpec::Random {
                scale: rng.random_range(0.5..3.0),
            },
            shape: [rows, cols],
            norm: NormSpec::Operator,
            polar: PolarChoice::Exact,
            ns_iters: tol::NS_ITERS,
            seed: opts.seed.wrapping_add(i as u64),
            noise: 0.0,
            selection: Default::default(),
            output: "unused.csv".into(),
        };
        Ok(max_excess(&run_experiment(&cfg)?))
    })?;
    checks.push(Check::at_most(
        format!("{trials} random EF runs: max_T f(avg W_T) - bound_T"),
        max_of(excess),
        0.0,
    ));
    Ok(checks)
}

fn max_excess(out: &super::RunOutput) -> f64 {
    if out.bound.len() != out.rows.len() {
        return f64::NAN;
    }
    max_of(out.rows.iter().zip(&out.bound).map(|(r, b)| r.favg - b.unwrap_or(f64::NAN)))
}

fn polar(opts: &SuiteOptions) -> Result<Vec<Check>, HarnessError> {
    let trials = opts.trials(Suite::Polar);
    let exact = opts.exec.try_map(trials, |i| -> Result<bool, HarnessError> {
        let mut rng = trial_rng(opts.seed ^ (0x90 << 32), i as u64);
        let (rows, cols) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let diag: Vec<f64> = (0..rows.min(cols))
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { gaussian(&mut rng) * 10f64.powi(rng.random_range(-6..=6)) })
            .collect();
        let d = Matrix::from_diag(rows, cols, &diag);
        Ok(polar_exact(&d)? == sign_elementwise(&d))
    })?;
    let ns = opts.exec.try_map(trials, |i| -> Result<f64, HarnessError> {
        let mut rng = trial_rng(opts.seed ^ (0x91 << 32), i as u64);
        let (rows, cols) = (rng.random_range(2..=8), rng.random_range(2..=8));
        let cond = if i == 0 { 1e3 } else { 10f64.powf(rng.random_range(0.0..3.0)) };
        let a = well_conditioned_matrix(&mut rng, rows, cols, cond).scaled(10f64.powf(rng.random_range(-3.0..3.0)));
        let approx = polar_newton_schulz(&a, tol::NS_ITERS)?.matrix;
        Ok(approx.sub(&polar_exact(&a)?).fro_norm())
    })?;
    Ok(vec![
        Check::all_of(
            format!("polar_exact(diagonal) == sign bitwise, {trials} matrices"),
            exact.iter().filter(|&&b| b).count(),
            trials,
        ),
        Check::at_most(
            format!("newton-schulz vs exact, cond <= 1e3, {trials} matrices, max ||diff||_F"),
            max_of(ns),
            1e-4,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(trials: usize) -> SuiteOptions {
        SuiteOptions {
            trials: Some(trials),
            ..SuiteOptions::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("bogus".parse::<Suite>().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn check_formatting() {
        let c = Check::at_most("x", 2.0, 1.0);
        assert!(!c.passed);
        assert!(c.to_string().starts_with("FAIL  x: observed 2.000000e0 <= required 1.000000e0"));
        assert!(!Check::at_most("nan", f64::NAN, 1.0).passed);
        assert!(Check::all_of("n", 3, 3).passed);
    }

    #[test]
    fn small_batteries_pass() {
        for suite in [Suite::Reduction, Suite::Compressor, Suite::Lmo, Suite::Polar] {
            let report = run_suite(suite, &quick(20)).unwrap();
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn sequential_and_parallel_reports_agree() {
        let seq = SuiteOptions {
            exec: Execution::Sequential,
            ..quick(8)
        };
        let par = SuiteOptions {
            exec: Execution::Parallel,
            ..quick(8)
        };
        for suite in [Suite::Reduction, Suite::Compressor, Suite::Polar] {
            assert_eq!(run_suite(suite, &seq).unwrap(), run_suite(suite, &par).unwrap());
        }
    }
}
