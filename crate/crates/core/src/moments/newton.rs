/// Power sums `m_p = Σ_i c_i^p` for `p = 1..=k`.
pub fn power_sums(c: &[f64], k: usize) -> Vec<f64> {
    (1..=k).map(|p| c.iter().map(|v| v.powi(p as i32)).sum()).collect()
}

/// Elementary symmetric polynomials `e_0..e_k` by the product expansion of `Π (1 + c_i t)`.
pub fn elementary_symmetric(c: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; c.len() + 1];
    e[0] = 1.0;
    for (n, &ci) in c.iter().enumerate() {
        for l in (1..=n + 1).rev() {
            e[l] += ci * e[l - 1];
        }
    }
    e
}

/// Newton's identities with unnormalised power sums:
/// `e_ℓ = (1/ℓ) Σ_{j=1}^{ℓ} (−1)^{j−1} e_{ℓ−j} m_j`.
pub fn newton_coefficients(m: &[f64]) -> Vec<f64> {
    let k = m.len();
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for l in 1..=k {
        let mut acc = 0.0;
        for j in 1..=l {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[l - j] * m[j - 1];
        }
        e[l] = acc / l as f64;
    }
    e
}
