use super::{l1_diff, project_simplex, Diagnostics, Estimate, EstimatorConfig};
use crate::error::{invalid, Error, Result};
use crate::labels::ErrorLabel;
use crate::mixture::{BitstringHistogram, Constraint, SideHistograms};
use nalgebra::{DMatrix, DVector};

/// Posterior second-moment matrix `A_V` of the rows given their reference
/// samples under a flat Dirichlet prior, and `b = V Y / (n m)`.
///
/// With `α_i = V_i + 1` and `α_0 = d + m`:
/// `A_il = ⟨α_i, α_l⟩/α_0² + δ_il (α_0‖α_i‖₁ − ‖α_i‖₂²)/(α_0²(α_0+1))`.
/// Every term reduces to sparse dot products since `‖α_i‖₁ = m + d` and
/// `⟨α_i, α_l⟩ = ⟨V_i, V_l⟩ + 2m + d`.
pub fn eiv_gram(y: &BitstringHistogram, v: &SideHistograms) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if v.m() == 0 {
        return Err(Error::NeedsSideInfo("errors-in-variables needs m >= 1".into()));
    }
    if y.total() == 0 {
        return Err(Error::EmptyData("errors-in-variables needs at least one sample".into()));
    }
    if y.d() != v.d() {
        return Err(invalid("histogram and side information disagree on d"));
    }
    let k = v.k();
    let (d, m, n) = (v.d() as f64, v.m() as f64, y.total() as f64);
    let a0 = d + m;
    let mut a = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for l in 0..=i {
            let vv = v.component(i).dot(v.component(l)) as f64;
            let mut val = (vv + 2.0 * m + d) / (a0 * a0);
            if i == l {
                let sq = vv + 2.0 * m + d;
                val += (a0 * (m + d) - sq) / (a0 * a0 * (a0 + 1.0));
            }
            a[(i, l)] = val;
            a[(l, i)] = val;
        }
    }
    let b = DVector::from_iterator(k, v.components().iter().map(|vi| y.dot(vi) as f64 / (n * m)));
    Ok((a, b))
}

/// Minimise `xᵀ A_V x − 2 bᵀx`, either in closed form or over the simplex.
pub fn eiv_least_squares(
    y: &BitstringHistogram,
    v: &SideHistograms,
    labels: &[ErrorLabel],
    simplex: bool,
    config: &EstimatorConfig,
) -> Result<Estimate> {
    config.validate()?;
    if labels.len() != v.k() {
        return Err(invalid("one label per side-information component is required"));
    }
    let (a, b) = eiv_gram(y, v)?;
    let k = v.k();
    if !simplex {
        let mut diag = Diagnostics::closed_form();
        let x = match a.clone().cholesky() {
            Some(ch) => ch.solve(&b),
            None => {
                diag.notes.push("A_V numerically singular; regularised with 1e-12 I".into());
                let reg = &a + DMatrix::<f64>::identity(k, k) * 1e-12;
                reg.cholesky()
                    .ok_or_else(|| Error::Numerical("A_V is not positive definite even after regularisation".into()))?
                    .solve(&b)
            }
        };
        return Estimate::new(x.iter().copied().collect(), labels.to_vec(), Constraint::Unconstrained, diag);
    }
    // accelerated projected gradient with step 1/L, L = 2 max row-sum of |A|
    let lip = 2.0 * (0..k).map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let obj = |x: &DVector<f64>| (x.transpose() * &a * x)[(0, 0)] - 2.0 * b.dot(x);
    let mut x = DVector::from_element(k, 1.0 / k as f64);
    let mut yk = x.clone();
    let mut t = 1.0f64;
    let mut diag = Diagnostics { objective_trace: vec![obj(&x)], ..Default::default() };
    for it in 0..config.max_iter {
        let grad = (&a * &yk - &b) * 2.0;
        let step = &yk - grad / lip;
        let xn = DVector::from_vec(project_simplex(step.as_slice()));
        let tn = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        yk = &xn + (&xn - &x) * ((t - 1.0) / tn);
        let delta = l1_diff(xn.as_slice(), x.as_slice());
        x = xn;
        t = tn;
        diag.iterations = it + 1;
        if delta < config.tol {
            diag.converged = true;
            break;
        }
    }
    diag.objective_trace.push(obj(&x));
    let mut out: Vec<f64> = x.iter().copied().collect();
    super::renormalize_simplex(&mut out);
    Estimate::new(out, labels.to_vec(), Constraint::Simplex, diag)
}
