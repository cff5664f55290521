//! Acceptance criteria 1 to 9, each checked against an oracle written here
//! (hand-rolled recursions, closed forms, nalgebra SVDs) rather than the
//! library code under test. Prints one PASS/FAIL line per criterion, then
//! fails if any criterion failed.

use std::f64::consts::LN_2;
use std::io::Write;

use efm_core::counterexample::{cex1_build, KinkyFunction};
use efm_core::harness::{run_and_write, run_experiment, ConfigFile, InitSpec};
use efm_core::linalg::{polar_exact, polar_newton_schulz, tol, Matrix};
use efm_core::lmo::{compress, lmo_min, NormSpec, ParamPoint, ProductNormSpec};
use efm_core::optim::{run, DiagonalAbsOracle, Method, OptimizerState, StepSchedule};
use efm_core::random::{gaussian, gaussian_matrix, gaussian_vec, trial_rng, well_conditioned_matrix};
use nalgebra::DMatrix;
use rand::Rng;
use sha2::{Digest, Sha256};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn kinky(c: f64, w11: f64, w22: f64) -> f64 {
    c * (w11 + w22).abs() + (w11 - w22).abs()
}

fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

fn from_na(a: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect()).collect();
    Matrix::from_rows(&rows)
}

/// Singular values, descending.
fn singular_values(a: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn nuclear(a: &Matrix) -> f64 {
    singular_values(a).iter().sum()
}

fn operator(a: &Matrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

fn lp(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn fro_sq(a: &Matrix) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum()
}

fn dot(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

/// Muon on the cex1-appendixE preset against `R_{t+1} = λ_t − R_t`, `R₀ = ln 2`.
fn criterion_1() -> Outcome {
    let cfg = ConfigFile::default().resolve(Some("cex1-appendixE")).unwrap();
    let beta = 0.9;
    let c = (1.0 - beta) / (2.0 * (1.0 + beta));
    assert_eq!((cfg.beta, cfg.steps), (beta, 5000));
    assert!((cfg.c - c).abs() < 1e-17);
    let out = run_experiment(&cfg).unwrap();
    let floor = (1.0 - beta) / (1.0 + beta);
    let (mut sum_dev, mut min_f, mut closed) = (0.0f64, f64::INFINITY, 0.0f64);
    let mut r_t = LN_2;
    for (t, row) in out.rows.iter().enumerate() {
        assert_eq!(row.t, t);
        let shift = if t % 2 == 0 { r_t } else { -r_t };
        closed = closed.max((row.w11 - (1.0 + shift)).abs()).max((row.w22 - (1.0 - shift)).abs());
        sum_dev = sum_dev.max((row.w11 + row.w22 - 2.0).abs());
        min_f = min_f.min(kinky(c, row.w11, row.w22));
        r_t = 1.0 / (t as f64 + 1.0) - r_t;
    }
    outcome(
        out.rows.len() == 5001 && sum_dev <= 1e-10 && min_f >= floor && closed <= 1e-10,
        format!(
            "rows {}, max |sum-2| {sum_dev:.2e}, min f {min_f:.6} (floor {floor:.6}), closed-form dev {closed:.2e}",
            out.rows.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut all = true;
    for beta in [0.0, 0.5, 0.9] {
        for schedule in [StepSchedule::Constant { lambda: 0.2 }, StepSchedule::InvT] {
            let (mut f, w0, _) = cex1_build(beta, schedule.clone(), 1.0, 0.0, 5000).unwrap();
            let c = (1.0 - beta) / 2.0;
            assert!((f.c() - c).abs() < 1e-16);
            let mut state = OptimizerState::new(w0, beta, NormSpec::Operator, schedule).unwrap();
            let trace = run(Method::Muon, &mut f, &mut state, 5000).unwrap();
            for row in &trace.rows {
                // inf f = 0
                let gap = kinky(c, row.w11, row.w22) - (1.0 - beta);
                worst = worst.min(gap);
                all &= gap >= 0.0;
            }
        }
    }
    outcome(all, format!("6 configs x 5001 iterates, min f - (1-beta)r = {worst:.3e}"))
}

fn criterion_3() -> Outcome {
    const HORIZON: usize = 2000;
    let mut ok_runs = 0;
    let mut total = 0;
    let (mut drift, mut min_q, mut margin) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for (b, beta) in [0.0, 0.2, 0.4].into_iter().enumerate() {
        let c = 0.5 - beta;
        for kind in 0..2 {
            for i in 0..100u64 {
                let mut rng = trial_rng(0xACCE + (b * 2 + kind) as u64, i);
                let w0 = gaussian_matrix(&mut rng, 2, 2);
                let schedule = if kind == 0 {
                    StepSchedule::AdaptiveNuclear {
                        base: rng.random_range(0.01..0.2),
                    }
                } else {
                    StepSchedule::Table {
                        values: (0..=HORIZON).map(|_| rng.random_range(1e-3..0.2)).collect(),
                    }
                };
                let mut f = KinkyFunction::new(2, 2, c).unwrap();
                let mut state = OptimizerState::new(w0, beta, NormSpec::Operator, schedule).unwrap();
                let trace = run(Method::Muon, &mut f, &mut state, HORIZON).unwrap();
                let p0 = trace.rows[0].w11 + trace.rows[0].w22;
                let mut ok = true;
                for row in &trace.rows {
                    let (p, q) = (row.w11 + row.w22, row.w11 - row.w22);
                    let m = kinky(c, row.w11, row.w22) - c * p0.abs();
                    drift = drift.max((p - p0).abs());
                    min_q = min_q.min(q.abs());
                    margin = margin.min(m);
                    ok &= (p - p0).abs() <= 1e-12 && q != 0.0 && m >= 0.0;
                }
                total += 1;
                ok_runs += usize::from(ok);
            }
        }
    }
    outcome(
        ok_runs == total,
        format!("{ok_runs}/{total} runs; max |p-p0| {drift:.2e}, min |q| {min_q:.2e}, min f - c|p0| {margin:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let cfg = ConfigFile::default().resolve(Some("efm-appendixE")).unwrap();
    assert_eq!(cfg.method, Method::EfMuon);
    let out = run_experiment(&cfg).unwrap();
    let (beta, delta, c): (f64, f64, f64) = (cfg.beta, 0.5, cfg.c);
    let sigma = (2.0 * (1.0 + c * c)).sqrt();
    let dist0 = (1.0 + LN_2).hypot(1.0 - LN_2);
    let kappa = 2.0 * (1.0 - delta).sqrt() / delta + beta / (1.0 - beta) + 0.5;
    let (mut s11, mut s22) = (0.0, 0.0);
    let mut worst = f64::NEG_INFINITY;
    for (t, row) in out.rows.iter().enumerate() {
        s11 += row.w11;
        s22 += row.w22;
        let n = t as f64 + 1.0;
        let favg = kinky(c, s11 / n, s22 / n);
        let bound = dist0 * dist0 / (2.0 * n.sqrt()) + sigma * sigma * kappa * (1.0 + n.ln()) / n.sqrt();
        worst = worst.max(favg - bound);
    }
    let last = out.rows.last().unwrap();
    let f_t = kinky(c, last.w11, last.w22);
    outcome(
        out.rows.len() == 5001 && f_t < 0.05 && worst <= 0.0,
        format!("f(W_5000) = {f_t:.5}, max_T f(avg W_T) - bound_T = {worst:.4}"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut rng = trial_rng(0x5EED, i);
        let dim = rng.random_range(2..=5);
        let terms: Vec<(Vec<f64>, f64)> = (0..rng.random_range(1..=4))
            .map(|_| (gaussian_vec(&mut rng, dim), gaussian(&mut rng)))
            .collect();
        let beta: f64 = rng.random_range(0.0..0.95);
        let kind = rng.random_range(0..3);
        let lambda0 = rng.random_range(0.01..0.3);
        let lambda = |t: usize| match kind {
            0 => lambda0,
            1 => 1.0 / (t as f64 + 1.0),
            _ => 1.0 / (t as f64 + 1.0).sqrt(),
        };
        let schedule = match kind {
            0 => StepSchedule::Constant { lambda: lambda0 },
            1 => StepSchedule::InvT,
            _ => StepSchedule::InvSqrtT,
        };
        let x0 = gaussian_vec(&mut rng, dim);
        let mut oracle = DiagonalAbsOracle::new(terms.clone()).unwrap();
        let mut state = OptimizerState::new(Matrix::from_diag(dim, dim, &x0), beta, NormSpec::Operator, schedule).unwrap();
        let (mut x, mut m) = (x0, vec![0.0; dim]);
        for t in 0..100 {
            state.step(Method::Muon, &mut oracle).unwrap();
            let mut g = vec![0.0; dim];
            for (a, b) in &terms {
                let r = a.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>() + b;
                let s = if r > 0.0 { 1.0 } else if r < 0.0 { -1.0 } else { 0.0 };
                for (gi, ai) in g.iter_mut().zip(a) {
                    *gi += s * ai;
                }
            }
            for k in 0..dim {
                m[k] = beta * m[k] + (1.0 - beta) * g[k];
                let s = if m[k] > 0.0 { 1.0 } else if m[k] < 0.0 { -1.0 } else { 0.0 };
                x[k] -= lambda(t) * s;
            }
            for r in 0..dim {
                for col in 0..dim {
                    let want = if r == col { x[r] } else { 0.0 };
                    worst = worst.max((state.w[(r, col)] - want).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("50 trials x 100 steps, max |muon - signed momentum| = {worst:.2e}"))
}

fn random_product_spec(rng: &mut impl Rng) -> ProductNormSpec {
    let dims = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(1..=5), rng.random_range(1..=5)))
        .collect();
    ProductNormSpec::new(dims, rng.random_range(0.5..4.0), rng.random_range(1..=4)).unwrap()
}

/// `(s y² + ‖θ‖₁²/k)^{1/2}` with `y = Σ_ℓ ‖Wˡ‖_nuc/√d_ℓ`.
fn product_dual(spec: &ProductNormSpec, w: &ParamPoint) -> f64 {
    let y: f64 = w
        .matrices
        .iter()
        .map(|m| nuclear(m) / (m.rows().min(m.cols()) as f64).sqrt())
        .sum();
    let l1: f64 = w.theta.iter().map(|x| x.abs()).sum();
    (spec.s * y * y + l1 * l1 / spec.k as f64).sqrt()
}

fn product_primal(spec: &ProductNormSpec, w: &ParamPoint) -> f64 {
    let layer = w
        .matrices
        .iter()
        .map(|m| ((m.rows().min(m.cols()) as f64) / spec.s).sqrt() * operator(m))
        .fold(0.0, f64::max);
    let tinf = lp(&w.theta, f64::INFINITY);
    (layer * layer + spec.k as f64 * tinf * tinf).sqrt()
}

fn param_fro_sq(w: &ParamPoint) -> f64 {
    w.matrices.iter().map(fro_sq).sum::<f64>() + w.theta.iter().map(|x| x * x).sum::<f64>()
}

fn param_minus(a: &ParamPoint, b: &ParamPoint) -> ParamPoint {
    ParamPoint {
        matrices: a.matrices.iter().zip(&b.matrices).map(|(x, y)| x.sub(y)).collect(),
        theta: a.theta.iter().zip(&b.theta).map(|(x, y)| x - y).collect(),
    }
}

fn dense_cases() -> Vec<(NormSpec, bool)> {
    vec![
        (NormSpec::L1, true),
        (NormSpec::L2, true),
        (NormSpec::Linf, true),
        (NormSpec::Lp(1.5), true),
        (NormSpec::Lp(3.0), true),
        (NormSpec::Operator, false),
        (NormSpec::Nuclear, false),
    ]
}

fn dense_input(rng: &mut impl Rng, vector: bool) -> Matrix {
    let (rows, cols) = if vector {
        (rng.random_range(1..=12), 1)
    } else {
        (rng.random_range(1..=6), rng.random_range(1..=6))
    };
    gaussian_matrix(rng, rows, cols)
}

/// `δ` for a `rows × cols` operand: `1/d` for ℓ₁ and ℓ_∞, `d^{−|1−2/p|}` for
/// ℓ_p, `1/min(m, n)` for the operator and nuclear norms.
fn delta_oracle(spec: &NormSpec, rows: usize, cols: usize) -> f64 {
    let d = (rows * cols) as f64;
    match spec {
        NormSpec::L1 | NormSpec::Linf => 1.0 / d,
        NormSpec::L2 => 1.0,
        NormSpec::Lp(p) => d.powf(-(1.0 - 2.0 / p).abs()),
        NormSpec::Operator | NormSpec::Nuclear => 1.0 / rows.min(cols) as f64,
        NormSpec::Product(_) => unreachable!(),
    }
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    let mut all = true;
    for (s, (spec, vector)) in dense_cases().into_iter().enumerate() {
        let mut worst = f64::NEG_INFINITY;
        for i in 0..1000u64 {
            let mut rng = trial_rng(0x600 + s as u64, i);
            let w = dense_input(&mut rng, vector);
            let delta = delta_oracle(&spec, w.rows(), w.cols());
            let residual = fro_sq(&w.sub(&compress(&w, &spec).unwrap()));
            worst = worst.max(residual - (1.0 - delta) * fro_sq(&w));
        }
        all &= worst <= 1e-8;
        lines.push(format!("{} {worst:.1e}", spec.name()));
    }
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000u64 {
        let mut rng = trial_rng(0x6FF, i);
        let p = random_product_spec(&mut rng);
        let w = ParamPoint::gaussian(&p, &mut rng);
        let alpha_sq = f64::min(1.0, 1.0 / (p.s * p.layers() as f64));
        let dual = product_dual(&p, &w);
        let cw = compress(&w, &NormSpec::Product(p.clone())).unwrap();
        let residual = param_fro_sq(&param_minus(&w, &cw));
        worst = worst.max(residual - (param_fro_sq(&w) - alpha_sq * dual * dual));
    }
    all &= worst <= 1e-8;
    lines.push(format!("product {worst:.1e}"));
    outcome(all, format!("max excess over the contraction bound: {}", lines.join(", ")))
}

fn dual_oracle(spec: &NormSpec, w: &Matrix) -> f64 {
    match spec {
        NormSpec::L1 => lp(w.as_slice(), f64::INFINITY),
        NormSpec::L2 => lp(w.as_slice(), 2.0),
        NormSpec::Linf => lp(w.as_slice(), 1.0),
        NormSpec::Lp(p) => lp(w.as_slice(), p / (p - 1.0)),
        NormSpec::Operator => nuclear(w),
        NormSpec::Nuclear => operator(w),
        NormSpec::Product(_) => unreachable!(),
    }
}

fn primal_oracle(spec: &NormSpec, w: &Matrix) -> f64 {
    match spec {
        NormSpec::L1 => lp(w.as_slice(), 1.0),
        NormSpec::L2 => lp(w.as_slice(), 2.0),
        NormSpec::Linf => lp(w.as_slice(), f64::INFINITY),
        NormSpec::Lp(p) => lp(w.as_slice(), *p),
        NormSpec::Operator => operator(w),
        NormSpec::Nuclear => nuclear(w),
        NormSpec::Product(_) => unreachable!(),
    }
}

/// Least-Frobenius check by grid search over every maximizer
/// `LMO(W) + U_⊥ Z V_⊥ᵀ` with `‖Z‖_op ≤ 1`, on rank-deficient `3 × 3` input.
/// Returns (min Frobenius excess over the LMO, max pairing error).
fn operator_grid_case(case: u64) -> (f64, f64) {
    let mut rng = trial_rng(0x7A7, case);
    let rank = 1 + (case % 2) as usize;
    let w = gaussian_matrix(&mut rng, 3, rank).matmul(&gaussian_matrix(&mut rng, rank, 3)).unwrap();
    let svd = to_na(&w).svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let null: Vec<usize> = (0..3).filter(|&k| svd.singular_values[k] < 1e-9).collect();
    assert_eq!(null.len(), 3 - rank);
    let lmo = lmo_min(&w, &NormSpec::Operator).unwrap();
    let nuc = nuclear(&w);
    let steps: Vec<f64> = if null.len() == 1 {
        (0..=40).map(|k| -1.0 + k as f64 / 20.0).collect()
    } else {
        (0..=8).map(|k| -1.0 + k as f64 / 4.0).collect()
    };
    let cells = steps.len().pow((null.len() * null.len()) as u32);
    let (mut min_excess, mut max_pair) = (f64::INFINITY, 0.0f64);
    for idx in 0..cells {
        let mut z = DMatrix::<f64>::zeros(null.len(), null.len());
        let mut rest = idx;
        for e in z.iter_mut() {
            *e = steps[rest % steps.len()];
            rest /= steps.len();
        }
        if z.singular_values().max() > 1.0 {
            continue;
        }
        let mut cand = to_na(&lmo);
        for (a, &ia) in null.iter().enumerate() {
            for (b, &ib) in null.iter().enumerate() {
                cand += z[(a, b)] * u.column(ia) * vt.row(ib);
            }
        }
        let cand = from_na(&cand);
        assert!(operator(&cand) <= 1.0 + 1e-9);
        min_excess = min_excess.min(fro_sq(&cand).sqrt() - fro_sq(&lmo).sqrt());
        max_pair = max_pair.max((dot(&cand, &w) - nuc).abs());
    }
    (min_excess, max_pair)
}

fn criterion_7() -> Outcome {
    let (mut pair, mut primal) = (0.0f64, 0.0f64);
    for (s, (spec, vector)) in dense_cases().into_iter().enumerate() {
        for i in 0..1000u64 {
            let mut rng = trial_rng(0x700 + s as u64, i);
            let w = dense_input(&mut rng, vector);
            let x = lmo_min(&w, &spec).unwrap();
            pair = pair.max((dot(&x, &w) - dual_oracle(&spec, &w)).abs());
            primal = primal.max(primal_oracle(&spec, &x));
        }
    }
    for i in 0..1000u64 {
        let mut rng = trial_rng(0x7FF, i);
        let p = random_product_spec(&mut rng);
        let w = ParamPoint::gaussian(&p, &mut rng);
        let x = lmo_min(&w, &NormSpec::Product(p.clone())).unwrap();
        let pairing: f64 = x.matrices.iter().zip(&w.matrices).map(|(a, b)| dot(a, b)).sum::<f64>()
            + x.theta.iter().zip(&w.theta).map(|(a, b)| a * b).sum::<f64>();
        pair = pair.max((pairing - product_dual(&p, &w)).abs());
        primal = primal.max(product_primal(&p, &x));
    }
    let (mut excess, mut grid_pair) = (f64::INFINITY, 0.0f64);
    for case in 0..20 {
        let (e, g) = operator_grid_case(case);
        excess = excess.min(e);
        grid_pair = grid_pair.max(g);
    }
    outcome(
        pair <= 1e-8 && primal <= 1.0 + 1e-10 && excess >= -1e-12 && grid_pair <= 1e-9,
        format!(
            "max pairing err {pair:.1e}, max ||LMO|| {primal:.12}, grid: min ||X||_F - ||LMO||_F {excess:.1e}, pairing err {grid_pair:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut exact = 0;
    for i in 0..500u64 {
        let mut rng = trial_rng(0x800, i);
        let (rows, cols) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let diag: Vec<f64> = (0..rows.min(cols))
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { gaussian(&mut rng) * 10f64.powi(rng.random_range(-6..=6)) })
            .collect();
        let d = Matrix::from_diag(rows, cols, &diag);
        let sign = d.map(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 });
        exact += usize::from(polar_exact(&d).unwrap() == sign);
    }
    let mut worst = 0.0f64;
    for i in 0..500u64 {
        let mut rng = trial_rng(0x801, i);
        let (rows, cols) = (rng.random_range(2..=8), rng.random_range(2..=8));
        let cond = 10f64.powf(rng.random_range(0.0..3.0));
        let a = well_conditioned_matrix(&mut rng, rows, cols, cond);
        let s = singular_values(&a);
        assert!(s[0] / s[s.len() - 1] <= 1e3 * (1.0 + 1e-9));
        let svd = to_na(&a).svd(true, true);
        let reference = from_na(&(svd.u.unwrap() * svd.v_t.unwrap()));
        let ns = polar_newton_schulz(&a, tol::NS_ITERS).unwrap().matrix;
        worst = worst.max(fro_sq(&ns.sub(&reference)).sqrt());
    }
    outcome(
        exact == 500 && worst <= 1e-4,
        format!("diagonal exact {exact}/500, max ||NS - polar||_F {worst:.2e} over 500 matrices"),
    )
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ConfigFile::parse(
        "preset = \"efm-appendixE\"\nsteps = 2000\nnoise = 0.25\nseed = 99\nshape = [3, 4]\n\n[init]\nkind = \"random\"\nscale = 1.5\n",
    )
    .unwrap()
    .resolve(None)
    .unwrap();
    let mut digests = Vec::new();
    for name in ["a.csv", "b.csv"] {
        cfg.output = dir.path().join(name);
        run_and_write(&cfg).unwrap();
        digests.push(Sha256::digest(std::fs::read(&cfg.output).unwrap()).to_vec());
    }
    cfg.init = InitSpec::Random { scale: 1.5 };
    cfg.seed = 100;
    cfg.output = dir.path().join("c.csv");
    run_and_write(&cfg).unwrap();
    let other = Sha256::digest(std::fs::read(&cfg.output).unwrap()).to_vec();
    outcome(
        digests[0] == digests[1] && digests[0] != other,
        format!(
            "sha256 {} twice; seed 100 gives a different file: {}",
            digests[0].iter().map(|b| format!("{b:02x}")).collect::<String>(),
            digests[0] != other
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("counterexample 1 on the cex1-appendixE preset", criterion_1),
        ("counterexample 1 floor", criterion_2),
        ("counterexample 2 floor", criterion_3),
        ("error feedback reaches the minimizer within the bound", criterion_4),
        ("muon reduces to signed momentum", criterion_5),
        ("compressor contraction", criterion_6),
        ("lmo duality and least norm", criterion_7),
        ("polar factor", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        // written past the test harness's output capture
        writeln!(std::io::stdout().lock(), "criterion {}: {verdict}  {name}: {}", n + 1, o.detail).unwrap();
        if !o.passed {
            failed.push(n + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
