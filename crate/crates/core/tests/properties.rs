use efm_core::counterexample::{cex1_build, KinkyFunction};
use efm_core::harness::{read_csv, run_experiment, write_csv, ConfigFile};
use efm_core::linalg::{polar_exact, Matrix};
use efm_core::lmo::{compress, lmo_min, NormSpec};
use efm_core::optim::{efm_bound, efm_bound_prefixes, run, Method, OptimizerState, StepSchedule};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-10.0f64..10.0, r * c).prop_map(move |v| Matrix::from_vec(r, c, v).unwrap())
    })
}

fn column() -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-10.0f64..10.0, 1..=10).prop_map(|v| Matrix::from_vec(v.len(), 1, v).unwrap())
}

fn fro_sq(a: &Matrix) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum()
}

fn dot(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

fn schedule() -> impl Strategy<Value = StepSchedule> {
    prop_oneof![
        (0.01f64..0.5).prop_map(|lambda| StepSchedule::Constant { lambda }),
        Just(StepSchedule::InvT),
        Just(StepSchedule::InvSqrtT),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectral_compressor_contracts(w in matrix()) {
        let delta = 1.0 / w.rows().min(w.cols()) as f64;
        let residual = fro_sq(&w.sub(&compress(&w, &NormSpec::Operator).unwrap()));
        prop_assert!(residual <= (1.0 - delta) * fro_sq(&w) + 1e-9 * (1.0 + fro_sq(&w)));
    }

    #[test]
    fn vector_lmo_attains_the_dual_norm(w in column(), p in 1.1f64..6.0) {
        let x = lmo_min(&w, &NormSpec::Lp(p)).unwrap();
        let q = p / (p - 1.0);
        let dual = w.as_slice().iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q);
        let primal = x.as_slice().iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        prop_assert!((dot(&x, &w) - dual).abs() <= 1e-9 * (1.0 + dual));
        prop_assert!(primal <= 1.0 + 1e-9);
    }

    #[test]
    fn operator_lmo_is_the_polar_factor(w in matrix()) {
        let x = lmo_min(&w, &NormSpec::Operator).unwrap();
        // partial isometry: X Xᵀ X = X
        let cube = x.matmul(&x.transpose()).unwrap().matmul(&x).unwrap();
        prop_assert!(fro_sq(&cube.sub(&x)) <= 1e-18);
        prop_assert!(dot(&x, &w) >= 0.0);
        prop_assert!(fro_sq(&x) <= w.rows().min(w.cols()) as f64 + 1e-9);
    }

    #[test]
    fn diagonal_polar_is_the_sign(diag in prop::collection::vec(prop_oneof![Just(0.0), -1e6f64..1e6], 1..=5), extra in 0usize..3) {
        let n = diag.len();
        let d = Matrix::from_diag(n, n + extra, &diag);
        let sign = d.map(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 });
        prop_assert_eq!(polar_exact(&d).unwrap(), sign);
    }

    #[test]
    fn muon_on_the_first_counterexample_keeps_the_diagonal_sum(
        beta in 0.0f64..0.95,
        schedule in schedule(),
        r in 1.0f64..3.0,
    ) {
        let (mut f, w0, _) = cex1_build(beta, schedule.clone(), r, 0.0, 300).unwrap();
        let mut state = OptimizerState::new(w0, beta, NormSpec::Operator, schedule).unwrap();
        let trace = run(Method::Muon, &mut f, &mut state, 300).unwrap();
        for row in &trace.rows {
            prop_assert!((row.w11 + row.w22 - 2.0 * r).abs() <= 1e-10);
            prop_assert!(f.diag_value(row.w11, row.w22) >= (1.0 - beta) * r - 1e-12);
        }
    }

    #[test]
    fn adaptive_step_muon_never_moves_the_sum(
        beta in 0.0f64..0.45,
        base in 0.01f64..0.3,
        w in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let mut f = KinkyFunction::new(2, 2, 0.5 - beta).unwrap();
        let w0 = Matrix::from_vec(2, 2, w).unwrap();
        let p0 = w0[(0, 0)] + w0[(1, 1)];
        let mut state = OptimizerState::new(w0, beta, NormSpec::Operator, StepSchedule::AdaptiveNuclear { base }).unwrap();
        let trace = run(Method::Muon, &mut f, &mut state, 300).unwrap();
        for row in &trace.rows {
            prop_assert!((row.w11 + row.w22 - p0).abs() <= 1e-12 * (1.0 + p0.abs()));
        }
    }

    #[test]
    fn closed_form_bound_dominates_the_prefix_sum(
        steps in 1usize..400,
        delta in 0.05f64..=1.0,
        beta in 0.0f64..0.99,
        sigma in 0.1f64..5.0,
        dist0 in 0.0f64..5.0,
    ) {
        let lambdas: Vec<f64> = (0..=steps).map(|t| 1.0 / ((t + 1) as f64).sqrt()).collect();
        let prefixes = efm_bound_prefixes(&lambdas, delta, beta, sigma, dist0).unwrap();
        let direct = efm_bound(steps, delta, beta, sigma, dist0).unwrap();
        // Σ λ_t² ≤ 1 + ln(T+1) and λ_T ≥ 1/√(T+1)
        prop_assert!(prefixes[steps] <= direct * (1.0 + 1e-12));
        let looser = efm_bound(steps, delta * 0.5, beta, sigma, dist0).unwrap();
        prop_assert!(looser >= direct);
    }
}

#[test]
fn csv_trace_round_trips_exactly() {
    let mut cfg = ConfigFile::default().resolve(Some("efm-appendixE")).unwrap();
    cfg.steps = 200;
    let out = run_experiment(&cfg).unwrap();
    let mut bytes = Vec::new();
    write_csv(&mut bytes, &out.rows, &out.bound).unwrap();
    let back = read_csv(bytes.as_slice()).unwrap();
    assert_eq!(back.len(), out.rows.len());
    for (rec, (row, bound)) in back.iter().zip(out.rows.iter().zip(&out.bound)) {
        assert_eq!(rec.row.w11.to_bits(), row.w11.to_bits());
        assert_eq!(rec.row.w22.to_bits(), row.w22.to_bits());
        assert_eq!(rec.bound.map(f64::to_bits), bound.map(f64::to_bits));
        assert!((rec.sum_diag - (row.w11 + row.w22)).abs() <= 1e-15 * (1.0 + rec.sum_diag.abs()));
    }
}
