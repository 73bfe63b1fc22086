use super::{l1_diff, renormalize_simplex, Diagnostics, Estimate, EstimatorConfig};
use crate::error::{invalid, Error, Result};
use crate::labels::ErrorLabel;
use crate::mixture::{BitstringHistogram, Constraint, SideHistograms};

/// `exp(ψ(1+v) + γ) = exp(H_v)`; the constant `e^{-γ}` cancels in every ratio.
fn exp_harmonic(v: u64) -> f64 {
    if v < 64 {
        (1..=v).map(|t| 1.0 / t as f64).sum::<f64>().exp()
    } else {
        let x = v as f64;
        let x2 = x * x;
        (x.ln() + 0.577_215_664_901_532_9 + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)).exp()
    }
}

/// Weights `S_ij ∝ exp(ψ(1 + V_ij))` on the support of `y`, cell-major.
pub fn vem_weights(y: &BitstringHistogram, v: &SideHistograms) -> Vec<f64> {
    let k = v.k();
    let supp = y.support();
    let mut s = vec![1.0; supp.len() * k];
    for (i, vi) in v.components().iter().enumerate() {
        let vs = vi.support();
        let (mut a, mut b) = (0, 0);
        while a < supp.len() && b < vs.len() {
            match supp[a].0.cmp(&vs[b].0) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    s[a * k + i] = exp_harmonic(vs[b].1);
                    a += 1;
                    b += 1;
                }
            }
        }
    }
    s
}

/// Mean-field free entropy up to constants: `Σ_j Y_j log Σ_i x_i S_ij`.
pub fn free_entropy(y: &BitstringHistogram, s: &[f64], x: &[f64]) -> f64 {
    let k = x.len();
    y.support()
        .iter()
        .enumerate()
        .map(|(j, &(_, c))| c as f64 * s[j * k..(j + 1) * k].iter().zip(x).map(|(a, b)| a * b).sum::<f64>().ln())
        .sum()
}

/// Variational EM for the side-information likelihood.
///
/// Iterates `x_i ← (x_i/n) Σ_j Y_j S_ij / Σ_r x_r S_rj` from `start` (uniform
/// by default) until `‖Δx‖₁ < tol`.
pub fn variational_em(
    y: &BitstringHistogram,
    v: &SideHistograms,
    labels: &[ErrorLabel],
    start: Option<&[f64]>,
    config: &EstimatorConfig,
) -> Result<Estimate> {
    config.validate()?;
    let k = v.k();
    if labels.len() != k {
        return Err(invalid("one label per side-information component is required"));
    }
    if y.d() != v.d() {
        return Err(invalid("histogram and side information disagree on d"));
    }
    if y.total() == 0 {
        return Err(Error::EmptyData("variational EM needs at least one sample".into()));
    }
    let mut x = match start {
        Some(s) if s.len() == k => s.to_vec(),
        Some(_) => return Err(invalid("start point has the wrong length")),
        None => vec![1.0 / k as f64; k],
    };
    renormalize_simplex(&mut x);
    let s = vem_weights(y, v);
    let n = y.total() as f64;
    let mut diag = Diagnostics { objective_trace: vec![free_entropy(y, &s, &x)], ..Default::default() };
    let mut acc = vec![0.0; k];
    for it in 0..config.max_iter {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (j, &(_, c)) in y.support().iter().enumerate() {
            let sj = &s[j * k..(j + 1) * k];
            let den: f64 = sj.iter().zip(&x).map(|(a, b)| a * b).sum();
            let r = c as f64 / den;
            for (ai, &sij) in acc.iter_mut().zip(sj) {
                *ai += r * sij;
            }
        }
        let mut next: Vec<f64> = x.iter().zip(&acc).map(|(xi, ai)| xi * ai / n).collect();
        renormalize_simplex(&mut next);
        let delta = l1_diff(&next, &x);
        x = next;
        diag.objective_trace.push(free_entropy(y, &s, &x));
        diag.iterations = it + 1;
        if delta < config.tol {
            diag.converged = true;
            break;
        }
    }
    Estimate::new(x, labels.to_vec(), Constraint::Simplex, diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_branches_agree() {
        for v in [64u64, 100, 1000] {
            let direct: f64 = (1..=v).map(|t| 1.0 / t as f64).sum();
            assert!((exp_harmonic(v).ln() - direct).abs() < 1e-12);
        }
        assert_eq!(exp_harmonic(0), 1.0);
    }

    #[test]
    fn no_side_info_is_a_fixed_point() {
        let y = BitstringHistogram::from_dense(&[3, 1, 0, 2]);
        let v = SideHistograms::new(4, 0, vec![BitstringHistogram::empty(4); 2]).unwrap();
        let labels = vec![ErrorLabel::ideal(), ErrorLabel::custom("b")];
        let cfg = EstimatorConfig { max_iter: 5, ..Default::default() };
        let e = variational_em(&y, &v, &labels, Some(&[0.3, 0.7]), &cfg).unwrap();
        assert!((e.values()[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn one_iteration_matches_hand_arithmetic() {
        let y = BitstringHistogram::from_dense(&[3, 1, 0, 2]);
        let v = SideHistograms::new(
            4,
            2,
            vec![BitstringHistogram::from_dense(&[2, 0, 0, 0]), BitstringHistogram::from_dense(&[0, 0, 0, 2])],
        )
        .unwrap();
        let labels = vec![ErrorLabel::ideal(), ErrorLabel::custom("b")];
        let cfg = EstimatorConfig { max_iter: 1, ..Default::default() };
        let e = variational_em(&y, &v, &labels, None, &cfg).unwrap();
        let a = 1.5f64.exp();
        let x1 = (6.0 * a / (a + 1.0) + 1.0 + 4.0 / (1.0 + a)) / 12.0;
        let x2 = (6.0 / (a + 1.0) + 1.0 + 4.0 * a / (1.0 + a)) / 12.0;
        assert!((e.values()[0] - x1).abs() < 1e-12 && (e.values()[1] - x2).abs() < 1e-12);
        let one = variational_em(&y, &SideHistograms::new(4, 2, vec![v.component(0).clone()]).unwrap(), &labels[..1], None, &cfg);
        assert_eq!(one.unwrap().values(), &[1.0]);
    }
}
