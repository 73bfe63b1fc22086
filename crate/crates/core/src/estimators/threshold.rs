use super::{xeb_estimate, Estimate, EstimatorConfig, ThresholdChoice, ThresholdKind};
use crate::error::{invalid, Error, Result};
use crate::mixture::{BitstringHistogram, Constraint, DistributionMatrix};
use crate::rng::rng;
use rand_distr::{Binomial, Distribution};

/// Hard: keep `x` when `|x| > λ`. Soft: `sign(x)·max(|x| − λ, 0)`.
pub fn apply_threshold(values: &[f64], lambda: f64, kind: ThresholdKind) -> Vec<f64> {
    values
        .iter()
        .map(|&x| match kind {
            ThresholdKind::Hard => {
                if x.abs() > lambda {
                    x
                } else {
                    0.0
                }
            }
            ThresholdKind::Soft => x.signum() * (x.abs() - lambda).max(0.0),
        })
        .collect()
}

pub fn threshold(est: &Estimate, lambda: f64, kind: ThresholdKind) -> Result<Estimate> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("threshold {lambda} must be nonnegative")));
    }
    let mut diag = est.diagnostics.clone();
    diag.lambda = Some(lambda);
    Estimate::new(apply_threshold(est.values(), lambda, kind), est.labels().to_vec(), Constraint::Unconstrained, diag)
}

/// Split samples into two independent halves by fair binomial thinning.
pub fn split_histogram(y: &BitstringHistogram, seed: u64) -> Result<(BitstringHistogram, BitstringHistogram)> {
    let mut r = rng(seed);
    let mut a = Vec::with_capacity(y.support_len());
    let mut b = Vec::with_capacity(y.support_len());
    for &(z, c) in y.support() {
        let h = Binomial::new(c, 0.5).map_err(|e| Error::Numerical(e.to_string()))?.sample(&mut r);
        a.push((z, h));
        b.push((z, c - h));
    }
    Ok((BitstringHistogram::from_pairs(y.d(), a)?, BitstringHistogram::from_pairs(y.d(), b)?))
}

/// Two-fold cross-validated threshold for `base`.
///
/// Each fold's thresholded estimate is scored against the other fold's raw
/// estimate by `‖T_λ(ĉ_a)‖² − 2⟨T_λ(ĉ_a), ĉ_b⟩`, which is unbiased for the risk
/// up to a constant. Ties go to the larger λ. The chosen λ is divided by √2
/// because the full sample has half the per-fold variance.
pub fn cv_lambda<F>(y: &BitstringHistogram, seed: u64, kind: ThresholdKind, base: F) -> Result<f64>
where
    F: Fn(&BitstringHistogram) -> Result<Estimate>,
{
    let (ya, yb) = split_histogram(y, seed)?;
    if ya.total() == 0 || yb.total() == 0 {
        return Err(Error::EmptyData("a cross-validation fold is empty".into()));
    }
    let ca = base(&ya)?.values.values;
    let cb = base(&yb)?.values.values;
    let mut grid: Vec<f64> = std::iter::once(0.0).chain(ca.iter().chain(&cb).map(|v| v.abs())).collect();
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    let score = |lam: f64| {
        let mut s = 0.0;
        for (u, v) in [(&ca, &cb), (&cb, &ca)] {
            let t = apply_threshold(u, lam, kind);
            s += t.iter().zip(v.iter()).map(|(ti, vi)| ti * ti - 2.0 * ti * vi).sum::<f64>();
        }
        s
    };
    let scores: Vec<f64> = grid.iter().map(|&l| score(l)).collect();
    let best = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let slack = 1e-12 * best.abs().max(1e-300);
    let lam = grid.iter().zip(&scores).filter(|(_, &s)| s <= best + slack).map(|(&l, _)| l).fold(0.0, f64::max);
    Ok(lam / std::f64::consts::SQRT_2)
}

/// Thresholded XEB with λ fixed or chosen by cross-validation.
pub fn threshold_cv(pi: &DistributionMatrix, y: &BitstringHistogram, config: &EstimatorConfig, kind: ThresholdKind) -> Result<Estimate> {
    config.validate()?;
    let raw = xeb_estimate(pi, y)?;
    let lam = match config.threshold {
        ThresholdChoice::Fixed(l) => l,
        ThresholdChoice::CrossValidated => cv_lambda(y, config.cv_seed, kind, |h| xeb_estimate(pi, h))?,
    };
    threshold(&raw, lam, kind)
}
