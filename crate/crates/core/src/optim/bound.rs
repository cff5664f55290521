use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("stepsizes must be a nonempty, positive, nonincreasing sequence")]
    Stepsizes,
}

fn check(name: &'static str, value: f64, ok: bool, domain: &'static str) -> Result<(), BoundError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(BoundError::Domain { name, value, domain })
    }
}

/// `2√(1−δ)/δ + β/(1−β) + 1/2`
fn noise_coefficient(delta: f64, beta: f64, sigma: f64, dist0: f64) -> Result<f64, BoundError> {
    check("delta", delta, delta > 0.0 && delta <= 1.0, "(0, 1]")?;
    check("beta", beta, (0.0..1.0).contains(&beta), "[0, 1)")?;
    check("sigma", sigma, sigma >= 0.0, "[0, inf)")?;
    check("dist0", dist0, dist0 >= 0.0, "[0, inf)")?;
    Ok(2.0 * (1.0 - delta).sqrt() / delta + beta / (1.0 - beta) + 0.5)
}

/// Right-hand side of the anytime EF-M guarantee for `λ_t = 1/√(t+1)`:
/// `d₀²/(2√(T+1)) + σ² κ (1 + log(T+1))/√(T+1)` with `κ` from
/// [`noise_coefficient`].
pub fn efm_bound(steps: usize, delta: f64, beta: f64, sigma: f64, dist0: f64) -> Result<f64, BoundError> {
    let kappa = noise_coefficient(delta, beta, sigma, dist0)?;
    let n = steps as f64 + 1.0;
    Ok(dist0 * dist0 / (2.0 * n.sqrt()) + sigma * sigma * kappa * (1.0 + n.ln()) / n.sqrt())
}

/// The same guarantee for any nonincreasing `λ_0, …, λ_T`:
/// `d₀²/(2λ_T(T+1)) + σ² κ Σλ_t² / (λ_T(T+1))`.
pub fn efm_bound_general(lambdas: &[f64], delta: f64, beta: f64, sigma: f64, dist0: f64) -> Result<f64, BoundError> {
    let kappa = noise_coefficient(delta, beta, sigma, dist0)?;
    let valid = !lambdas.is_empty()
        && lambdas.iter().all(|&l| l > 0.0 && l.is_finite())
        && lambdas.windows(2).all(|w| w[1] <= w[0]);
    if !valid {
        return Err(BoundError::Stepsizes);
    }
    let last = *lambdas.last().unwrap_or(&1.0);
    let n = lambdas.len() as f64;
    let sq: f64 = lambdas.iter().map(|l| l * l).sum();
    Ok(dist0 * dist0 / (2.0 * last * n) + sigma * sigma * kappa * sq / (last * n))
}

/// [`efm_bound_general`] for every prefix `λ_0, …, λ_t`, `t = 0, …, T`, in
/// one pass.
pub fn efm_bound_prefixes(lambdas: &[f64], delta: f64, beta: f64, sigma: f64, dist0: f64) -> Result<Vec<f64>, BoundError> {
    let kappa = noise_coefficient(delta, beta, sigma, dist0)?;
    let valid = !lambdas.is_empty()
        && lambdas.iter().all(|&l| l > 0.0 && l.is_finite())
        && lambdas.windows(2).all(|w| w[1] <= w[0]);
    if !valid {
        return Err(BoundError::Stepsizes);
    }
    let mut sq = 0.0;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(t, &last)| {
            sq += last * last;
            let n = t as f64 + 1.0;
            dist0 * dist0 / (2.0 * last * n) + sigma * sigma * kappa * sq / (last * n)
        })
        .collect())
}
