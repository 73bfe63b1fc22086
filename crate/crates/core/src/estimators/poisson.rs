use super::support::SupportColumns;
use super::{l1_diff, Diagnostics, Estimate, EstimatorConfig};
use crate::error::{Error, Result};
use crate::mixture::{BitstringHistogram, Constraint, DistributionMatrix};
use nalgebra::{DMatrix, DVector};

struct Problem {
    cols: SupportColumns,
    row_sums: Vec<f64>,
    n: f64,
    ridge: f64,
}

impl Problem {
    fn objective(&self, x: &[f64], q: &mut Vec<f64>) -> f64 {
        self.cols.mix(x, q);
        let mut acc = 0.0;
        for (&c, &qj) in self.cols.counts.iter().zip(q.iter()) {
            if !(qj > 0.0) {
                return f64::NEG_INFINITY;
            }
            acc += c * qj.ln();
        }
        let lin: f64 = x.iter().zip(&self.row_sums).map(|(a, b)| a * b).sum();
        acc - self.n * lin - self.ridge * x.iter().map(|v| v * v).sum::<f64>()
    }

    /// Gradient and negated Hessian at `x` (with `q = Π^T x` on the support).
    fn derivatives(&self, x: &[f64], q: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let k = x.len();
        let mut g: Vec<f64> = self.row_sums.iter().zip(x).map(|(s, xi)| -self.n * s - 2.0 * self.ridge * xi).collect();
        let mut h = DMatrix::<f64>::zeros(k, k);
        for j in 0..self.cols.cells() {
            let a = self.cols.col(j);
            let r = self.cols.counts[j] / q[j];
            let w = r / q[j];
            for i in 0..k {
                if a[i] == 0.0 {
                    continue;
                }
                g[i] += r * a[i];
                let wa = w * a[i];
                for l in 0..=i {
                    h[(i, l)] += wa * a[l];
                }
            }
        }
        for i in 0..k {
            h[(i, i)] += 2.0 * self.ridge;
            for l in 0..i {
                h[(l, i)] = h[(i, l)];
            }
        }
        (g, h)
    }
}

/// The penalised Poisson log-likelihood `Σ_j (Y_j log q_j − n q_j) − ridge·‖x‖²`.
pub fn poisson_objective(pi: &DistributionMatrix, y: &BitstringHistogram, x: &[f64], n: f64, ridge: f64) -> Result<f64> {
    let p = Problem { cols: SupportColumns::new(pi, y)?, row_sums: pi.row_sums(), n, ridge };
    let mut q = Vec::new();
    Ok(p.objective(x, &mut q))
}

fn solve_spd(h: &DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = (0..h.nrows()).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut jitter = 0.0;
    for _ in 0..12 {
        let mut m = h.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = m.cholesky() {
            return Some(ch.solve(g));
        }
        jitter = if jitter == 0.0 { scale * 1e-14 } else { jitter * 100.0 };
    }
    None
}

/// Poisson maximum likelihood with a ridge penalty over the nonnegative cone.
///
/// Signed readout rows are allowed; the linear term uses row sums so the
/// full `d`-length mixture is never formed. Solved by projected Newton with
/// an Armijo search along the projection arc.
pub fn mle_poisson_ridge(pi: &DistributionMatrix, y: &BitstringHistogram, config: &EstimatorConfig) -> Result<Estimate> {
    config.validate()?;
    let k = pi.k();
    let n = config.poisson_rate.unwrap_or(y.total() as f64);
    let labels = pi.labels().to_vec();
    let prob_rows = pi.row_sums().iter().filter(|&&s| s > 0.0).count();
    if y.total() == 0 || prob_rows == 0 {
        let mut diag = Diagnostics::closed_form();
        diag.notes.push("no counts: the maximiser is x = 0".into());
        return Estimate::new(vec![0.0; k], labels, Constraint::NonnegativeCone, diag);
    }
    if !(n > 0.0) {
        return Err(Error::InvalidArgument(format!("Poisson rate {n} must be positive")));
    }
    let prob = Problem { cols: SupportColumns::new(pi, y)?, row_sums: pi.row_sums(), n, ridge: config.ridge };
    let start = y.total() as f64 / n / prob_rows as f64;
    let mut x: Vec<f64> = prob.row_sums.iter().map(|&s| if s > 0.0 { start } else { 0.0 }).collect();
    let mut q = Vec::new();
    let mut f = prob.objective(&x, &mut q);
    if !f.is_finite() {
        return Err(Error::Infeasible("no nonnegative start point gives positive rates on the observed support".into()));
    }
    let mut diag = Diagnostics { objective_trace: vec![f], ..Default::default() };
    let mut trial = Vec::new();
    for it in 0..config.max_iter {
        prob.cols.mix(&x, &mut q);
        let (g, h) = prob.derivatives(&x, &q);
        let free: Vec<usize> = (0..k).filter(|&i| x[i] > 0.0 || g[i] > 0.0).collect();
        let mut dir = vec![0.0; k];
        if !free.is_empty() {
            let hf = DMatrix::from_fn(free.len(), free.len(), |a, b| h[(free[a], free[b])]);
            let gf = DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]));
            match solve_spd(&hf, &gf) {
                Some(d) => free.iter().zip(d.iter()).for_each(|(&i, &v)| dir[i] = v),
                None => free.iter().for_each(|&i| dir[i] = g[i] / h[(i, i)].max(1e-300)),
            }
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-14 {
            trial.clear();
            trial.extend(x.iter().zip(&dir).map(|(xi, di)| (xi + t * di).max(0.0)));
            let ft = prob.objective(&trial, &mut q);
            let gain: f64 = g.iter().zip(trial.iter().zip(&x)).map(|(gi, (a, b))| gi * (a - b)).sum();
            if ft.is_finite() && ft >= f + 1e-4 * gain.max(0.0) && ft >= f {
                accepted = Some(ft);
                break;
            }
            t *= 0.5;
        }
        let Some(ft) = accepted else {
            diag.iterations = it + 1;
            diag.notes.push("line search stalled".into());
            diag.converged = l1_diff(&dir, &vec![0.0; k]) < config.tol.sqrt();
            break;
        };
        let delta = l1_diff(&trial, &x);
        let gain = ft - f;
        x.clone_from(&trial);
        f = ft;
        diag.objective_trace.push(f);
        diag.iterations = it + 1;
        if delta < config.tol || gain <= 1e-15 * f.abs().max(1.0) {
            diag.converged = true;
            break;
        }
    }
    Estimate::new(x, labels, Constraint::NonnegativeCone, diag)
}
