use super::Estimate;
use crate::error::{invalid, Result};
use crate::mixture::{sample_multinomial_counts, BitstringHistogram};
use crate::rng::{derive_seed, rng};
use rayon::prelude::*;

/// Draw `n` samples with replacement from the empirical distribution of `y`.
pub fn resample_histogram(y: &BitstringHistogram, seed: u64) -> Result<BitstringHistogram> {
    let n = y.total();
    if n == 0 {
        return Ok(y.clone());
    }
    let p: Vec<f64> = y.support().iter().map(|&(_, c)| c as f64 / n as f64).collect();
    let counts = sample_multinomial_counts(&p, n, &mut rng(seed))?;
    BitstringHistogram::from_pairs(y.d(), y.support().iter().zip(counts).map(|(&(z, _), c)| (z, c)))
}

/// Nonparametric bootstrap standard errors of `estimator` on `y`.
pub fn bootstrap_stderr<F>(y: &BitstringHistogram, n_boot: usize, seed: u64, estimator: F) -> Result<Vec<f64>>
where
    F: Fn(&BitstringHistogram) -> Result<Estimate> + Sync,
{
    if n_boot < 2 {
        return Err(invalid("bootstrap needs at least two replicates"));
    }
    let draws: Vec<Vec<f64>> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let yb = resample_histogram(y, derive_seed(seed, b as u64))?;
            Ok(estimator(&yb)?.values.values)
        })
        .collect::<Result<_>>()?;
    let k = draws[0].len();
    Ok((0..k)
        .map(|i| {
            let mean = draws.iter().map(|d| d[i]).sum::<f64>() / n_boot as f64;
            let var = draws.iter().map(|d| (d[i] - mean).powi(2)).sum::<f64>() / (n_boot - 1) as f64;
            var.sqrt()
        })
        .collect())
}
