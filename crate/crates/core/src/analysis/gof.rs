use super::stats::mean_se;
use crate::error::{invalid, Error, Result};
use crate::estimators::{mle_poisson_ridge, Estimate, EstimatorConfig};
use crate::mixture::{mixture_values, sample_poisson_rates, BitstringHistogram, DistributionMatrix};
use crate::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub chi2_obs: f64,
    pub null_mean: f64,
    pub null_sd: f64,
    pub p_value: f64,
    pub n_boot: usize,
}

fn rates(pi: &DistributionMatrix, x: &[f64], n: f64) -> Result<Vec<f64>> {
    let q = mixture_values(pi, x)?;
    if let Some(j) = q.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Infeasible(format!("fitted rate of cell {j} is {}; add a white-noise row", q[j])));
    }
    Ok(q.into_iter().map(|v| n * v).collect())
}

/// `Σ_j (Y_j − λ_j)²/λ_j` over all `d` cells.
pub fn chi2_statistic(y: &BitstringHistogram, lambda: &[f64]) -> f64 {
    let mut s: f64 = lambda.iter().sum();
    for &(j, c) in y.support() {
        let l = lambda[j as usize];
        let c = c as f64;
        s += (c - l) * (c - l) / l - l;
    }
    s
}

/// χ² goodness of fit of the Poisson mixture with a parametric-bootstrap null.
///
/// Each bootstrap draw is sampled from the fitted rates and refitted with the
/// ridge-penalised Poisson MLE before its statistic is computed.
pub fn chi2_gof(
    pi: &DistributionMatrix,
    y: &BitstringHistogram,
    fitted: &Estimate,
    n_boot: usize,
    seed: u64,
    config: &EstimatorConfig,
) -> Result<GofResult> {
    if n_boot < 2 {
        return Err(invalid("the goodness-of-fit bootstrap needs at least two replicates"));
    }
    if y.d() as usize != pi.d() || fitted.values().len() != pi.k() {
        return Err(invalid("Π, data and fitted weights disagree in shape"));
    }
    let n = config.poisson_rate.unwrap_or(y.total() as f64);
    let lam = rates(pi, fitted.values(), n)?;
    let chi2_obs = chi2_statistic(y, &lam);
    let null = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let yb = sample_poisson_rates(&lam, derive_seed(seed, b as u64))?;
            let cfg = EstimatorConfig { poisson_rate: Some(n), ..config.clone() };
            let refit = mle_poisson_ridge(pi, &yb, &cfg)?;
            Ok(chi2_statistic(&yb, &rates(pi, refit.values(), n)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (null_mean, se) = mean_se(&null);
    let null_sd = se * (n_boot as f64).sqrt();
    let p_value = null.iter().filter(|&&v| v >= chi2_obs).count() as f64 / n_boot as f64;
    Ok(GofResult { chi2_obs, null_mean, null_sd, p_value, n_boot })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cell_hand_value() {
        let y = BitstringHistogram::from_dense(&[7, 3]);
        // λ = (5, 5): (2² + 2²)/5
        assert!((chi2_statistic(&y, &[5.0, 5.0]) - 1.6).abs() < 1e-12);
        let y = BitstringHistogram::from_dense(&[0, 10]);
        assert!((chi2_statistic(&y, &[2.0, 8.0]) - (2.0 + 0.5)).abs() < 1e-12);
    }
}
