use super::MomentEstimate;
use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

/// Parlett-Reinsch balancing, in place.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut cc, mut g) = (c, r / radix);
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r / f) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Roots of the monic polynomial `z^k + a_1 z^{k−1} + … + a_k` from the
/// eigenvalues of its balanced companion matrix.
pub fn polynomial_roots(a: &[f64]) -> Result<Vec<Complex64>> {
    let k = a.len();
    if k == 0 {
        return Ok(vec![]);
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite polynomial coefficient".into()));
    }
    if k == 1 {
        return Ok(vec![Complex64::new(-a[0], 0.0)]);
    }
    let mut m = DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        m[(0, j)] = -a[j];
    }
    for i in 1..k {
        m[(i, i - 1)] = 1.0;
    }
    balance(&mut m);
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical(format!("companion eigen-solver did not converge for coefficients {a:?}")))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Roots of `z^k + Σ_j (−1)^j ê_j z^{k−j}`; `c_hat` holds their real parts in
/// descending order.
pub fn roots_and_estimate(e: &[f64]) -> Result<MomentEstimate> {
    if e.is_empty() || e[0] != 1.0 {
        return Err(invalid("coefficients must start with e_0 = 1"));
    }
    let k = e.len() - 1;
    if k > super::MAX_ORDER {
        return Err(invalid(format!("degree {k} exceeds {}", super::MAX_ORDER)));
    }
    let a: Vec<f64> = (1..=k).map(|j| if j % 2 == 1 { -e[j] } else { e[j] }).collect();
    let mut roots = polynomial_roots(&a)?;
    roots.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    let c_hat = roots.iter().map(|z| z.re).collect();
    Ok(MomentEstimate { m_hat: vec![], e_hat: e.to_vec(), roots, c_hat })
}

/// Largest recovered weight, clamped to `[0, 1]`.
pub fn fidelity_estimate(me: &MomentEstimate) -> f64 {
    me.c_hat.iter().cloned().fold(f64::NEG_INFINITY, f64::max).clamp(0.0, 1.0)
}

/// Minimal ℓ₁ matching distance between two weight vectors over permutations.
/// For scalars the optimal matching pairs sorted entries.
pub fn sorted_loss(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid("sorted loss needs equal lengths"));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(|p, q| p.total_cmp(q));
    y.sort_by(|p, q| p.total_cmp(q));
    Ok(x.iter().zip(&y).map(|(p, q)| (p - q).abs()).sum())
}
