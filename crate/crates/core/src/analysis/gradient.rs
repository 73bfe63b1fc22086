use super::stats::{ols_line, quantile_sorted};
use crate::error::{invalid, Result};
use crate::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Alternative {
    #[default]
    TwoSided,
    /// Rates grow with depth.
    Greater,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientTestResult {
    pub beta_hat: f64,
    pub null_betas: Vec<f64>,
    pub p_value: f64,
    /// 95% interval for β from the centred null quantiles.
    pub ci: (f64, f64),
    pub alternative: Alternative,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Unweighted least-squares slope of layer-mean rates against layer index.
pub fn layer_slope(rates_by_layer: &[f64]) -> Result<f64> {
    if rates_by_layer.len() < 3 {
        return Err(invalid("the gradient test needs at least three layers"));
    }
    let x: Vec<f64> = (0..rates_by_layer.len()).map(|l| l as f64).collect();
    Ok(ols_line(&x, rates_by_layer)?.1)
}

/// Assemble the test from an observed slope and slopes of null datasets.
pub fn gradient_test_from_null(beta_hat: f64, null_betas: Vec<f64>, alternative: Alternative) -> GradientTestResult {
    let b = null_betas.len();
    let centre = if b == 0 { 0.0 } else { null_betas.iter().sum::<f64>() / b as f64 };
    // two-sided distances are taken from the null mean, which absorbs any slope bias of the fit
    let extreme = null_betas
        .iter()
        .filter(|&&v| match alternative {
            Alternative::TwoSided => (v - centre).abs() >= (beta_hat - centre).abs(),
            Alternative::Greater => v >= beta_hat,
        })
        .count();
    let p_value = if b == 0 { 1.0 } else { extreme as f64 / b as f64 };
    let mut sorted = null_betas.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let ci = (
        beta_hat - (quantile_sorted(&sorted, 0.975) - centre),
        beta_hat - (quantile_sorted(&sorted, 0.025) - centre),
    );
    let mut notes = Vec::new();
    if b < 50 {
        notes.push(format!("only {b} null replicates; p-value resolution is coarse"));
    }
    GradientTestResult { beta_hat, null_betas, p_value, ci, alternative, notes }
}

/// Parametric-bootstrap test for a nonzero trend of error rates across layers.
///
/// `generator(seed)` must produce the layer-mean rates of one dataset drawn
/// from the time-independent null and re-estimated by the full pipeline.
pub fn gradient_test<G>(
    rates_by_layer: &[f64],
    n_boot: usize,
    seed: u64,
    alternative: Alternative,
    generator: G,
) -> Result<GradientTestResult>
where
    G: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let beta_hat = layer_slope(rates_by_layer)?;
    let null_betas = (0..n_boot)
        .into_par_iter()
        .map(|b| layer_slope(&generator(derive_seed(seed, b as u64))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(gradient_test_from_null(beta_hat, null_betas, alternative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_slopes() {
        assert_eq!(layer_slope(&[2e-3; 5]).unwrap(), 0.0);
        let line: Vec<f64> = (0..6).map(|t| 1e-3 + 2e-4 * t as f64).collect();
        assert!((layer_slope(&line).unwrap() - 2e-4).abs() < 1e-15);
        assert!(layer_slope(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn p_value_counts_extremes() {
        let r = gradient_test_from_null(0.5, vec![-0.6, -0.1, 0.2, 0.4, 0.7], Alternative::TwoSided);
        assert_eq!(r.p_value, 0.4);
        let r = gradient_test_from_null(0.5, vec![-0.6, -0.1, 0.2, 0.4, 0.7], Alternative::Greater);
        assert_eq!(r.p_value, 0.2);
        assert!(!r.notes.is_empty());
        assert!(r.ci.0 <= 0.5 && 0.5 <= r.ci.1);
    }

    #[test]
    fn generator_is_called_per_replicate() {
        let r = gradient_test(&[0.0, 1.0, 2.0], 60, 3, Alternative::TwoSided, |s| {
            let t = (s % 7) as f64 / 7.0 - 0.5;
            Ok(vec![0.0, t, 2.0 * t])
        })
        .unwrap();
        assert_eq!(r.null_betas.len(), 60);
        assert_eq!(r.beta_hat, 1.0);
        assert_eq!(r.p_value, 0.0);
    }
}
