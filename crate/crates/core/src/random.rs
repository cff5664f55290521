//! Seeded random inputs for property batteries and experiment initialization.
//!
//! Every generator takes an explicit RNG so that runs are reproducible; per-trial
//! streams come from [`trial_rng`], which keeps parallel and sequential
//! execution bit-identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix;

pub type Rng64 = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of the generator seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, gaussian_vec(rng, rows * cols)).expect("finite gaussian samples")
}

/// Haar-ish orthogonal `n × n` matrix from modified Gram–Schmidt on a Gaussian
/// matrix. Independent of the SVD code, so tests can use it as an oracle.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| g[(i, j)]).collect()).collect();
        let mut ok = true;
        for j in 0..n {
            for k in 0..j {
                let proj: f64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a * b).sum();
                let ck = cols[k].clone();
                for (a, b) in cols[j].iter_mut().zip(&ck) {
                    *a -= proj * b;
                }
            }
            let nrm = cols[j].iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                ok = false;
                break;
            }
            for a in &mut cols[j] {
                *a /= nrm;
            }
        }
        if ok {
            let mut q = Matrix::zeros(n, n);
            for (j, col) in cols.iter().enumerate() {
                for (i, &v) in col.iter().enumerate() {
                    q[(i, j)] = v;
                }
            }
            return q;
        }
    }
}

/// `Q₁ diag(σ) Q₂ᵀ` with `σ₁ = 1`, `σ_r = 1/cond` and the rest log-uniform in
/// between, so the condition number is exactly `cond` (up to rounding).
pub fn well_conditioned_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, cond: f64) -> Matrix {
    assert!(cond >= 1.0);
    let r = rows.min(cols);
    let mut sigma: Vec<f64> = (0..r)
        .map(|i| match i {
            0 => 1.0,
            _ if i == r - 1 => 1.0 / cond,
            _ => (-rng.random::<f64>() * cond.ln()).exp(),
        })
        .collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let q1 = random_orthogonal(rng, rows);
    let q2 = random_orthogonal(rng, cols);
    with_singular_values(&q1, &sigma, &q2)
}

/// `Q₁[:, :r] diag(σ) Q₂[:, :r]ᵀ` for square orthogonal `Q₁`, `Q₂`.
pub fn with_singular_values(q1: &Matrix, sigma: &[f64], q2: &Matrix) -> Matrix {
    let (m, n) = (q1.rows(), q2.rows());
    let mut a = Matrix::zeros(m, n);
    for (k, &s) in sigma.iter().enumerate() {
        for i in 0..m {
            for j in 0..n {
                a[(i, j)] += s * q1[(i, k)] * q2[(j, k)];
            }
        }
    }
    a
}
