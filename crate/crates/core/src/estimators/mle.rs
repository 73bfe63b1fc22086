use super::support::SupportColumns;
use super::{l1_diff, renormalize_simplex, Diagnostics, Estimate, EstimatorConfig};
use crate::error::{Error, Result};
use crate::mixture::{BitstringHistogram, Constraint, DistributionMatrix};

/// `(1/n) Σ_j Y_j log (Π^T x)_j` over the support; `-inf` if any term is non-positive.
pub fn multinomial_log_likelihood(pi: &DistributionMatrix, y: &BitstringHistogram, x: &[f64]) -> Result<f64> {
    let cols = SupportColumns::new(pi, y)?;
    let mut q = Vec::new();
    cols.mix(x, &mut q);
    Ok(loglik(&cols, &q))
}

fn loglik(cols: &SupportColumns, q: &[f64]) -> f64 {
    let n: f64 = cols.counts.iter().sum();
    let mut acc = 0.0;
    for (&c, &qj) in cols.counts.iter().zip(q) {
        if !(qj > 0.0) {
            return f64::NEG_INFINITY;
        }
        acc += c * qj.ln();
    }
    acc / n
}

/// One multiplicative EM update; returns `(F(x), L(x))`.
fn em_step(cols: &SupportColumns, x: &[f64], q: &mut Vec<f64>, g: &mut [f64]) -> (Vec<f64>, f64) {
    cols.mix(x, q);
    let l = loglik(cols, q);
    let n: f64 = cols.counts.iter().sum();
    g.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..cols.cells() {
        if q[j] > 0.0 {
            let r = cols.counts[j] / q[j];
            for (gi, &a) in g.iter_mut().zip(cols.col(j)) {
                *gi += r * a;
            }
        }
    }
    let mut next: Vec<f64> = x.iter().zip(g.iter()).map(|(xi, gi)| xi * gi / n).collect();
    renormalize_simplex(&mut next);
    (next, l)
}

/// Maximum-likelihood weights on the simplex under the multinomial model.
///
/// Plain multiplicative EM, optionally with squared extrapolation. Each
/// accelerated step is accepted only if its likelihood is at least that of
/// the second EM iterate, so the recorded objective never decreases.
pub fn mle_multinomial(pi: &DistributionMatrix, y: &BitstringHistogram, config: &EstimatorConfig) -> Result<Estimate> {
    config.validate()?;
    if !pi.all_probability() {
        return Err(Error::UnsupportedRowKind("the multinomial MLE needs probability rows only".into()));
    }
    if y.total() == 0 {
        return Err(Error::EmptyData("MLE needs at least one sample".into()));
    }
    let cols = SupportColumns::new(pi, y)?;
    cols.check_reachable()?;
    let k = pi.k();
    let mut x = vec![1.0 / k as f64; k];
    let mut q = Vec::with_capacity(cols.cells());
    let mut g = vec![0.0; k];
    let mut diag = Diagnostics::default();
    if k == 1 {
        cols.mix(&x, &mut q);
        diag.objective_trace.push(loglik(&cols, &q));
        diag.converged = true;
        return Estimate::new(x, pi.labels().to_vec(), Constraint::Simplex, diag);
    }
    for it in 0..config.max_iter {
        let (x1, l0) = em_step(&cols, &x, &mut q, &mut g);
        diag.objective_trace.push(l0);
        let next = if config.accelerate {
            let (x2, l1) = em_step(&cols, &x1, &mut q, &mut g);
            let r: Vec<f64> = x1.iter().zip(&x).map(|(a, b)| a - b).collect();
            let v: Vec<f64> = x2.iter().zip(&x1).zip(&r).map(|((a, b), ri)| a - b - ri).collect();
            let rn = r.iter().map(|t| t * t).sum::<f64>().sqrt();
            let vn = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            let mut alpha = if vn > 0.0 { -rn / vn } else { -1.0 };
            alpha = alpha.min(-1.0);
            let extrapolate = |a: f64| -> Vec<f64> {
                x.iter().zip(&r).zip(&v).map(|((xi, ri), vi)| xi - 2.0 * a * ri + a * a * vi).collect()
            };
            let mut xp = extrapolate(alpha);
            while xp.iter().any(|&t| t < 0.0) && alpha < -1.0 {
                alpha = ((alpha - 1.0) / 2.0).max(-1.0);
                if alpha > -1.0 + 1e-3 {
                    xp = extrapolate(alpha);
                } else {
                    alpha = -1.0;
                    xp = x2.clone();
                }
            }
            if alpha == -1.0 {
                x2
            } else {
                renormalize_simplex(&mut xp);
                let (x3, lp) = em_step(&cols, &xp, &mut q, &mut g);
                if lp >= l1 {
                    x3
                } else {
                    x2
                }
            }
        } else {
            x1
        };
        let delta = l1_diff(&next, &x);
        x = next;
        diag.iterations = it + 1;
        if delta < config.tol {
            diag.converged = true;
            break;
        }
    }
    cols.mix(&x, &mut q);
    diag.objective_trace.push(loglik(&cols, &q));
    renormalize_simplex(&mut x);
    Estimate::new(x, pi.labels().to_vec(), Constraint::Simplex, diag)
}
