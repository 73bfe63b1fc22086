/// Partial Bell polynomial `B_{p,ℓ}(x_1, …, x_{p−ℓ+1})` by the recurrence
/// `B_{n,k} = Σ_i C(n−1, i−1) x_i B_{n−i,k−1}`.
pub fn partial_bell(p: usize, l: usize, x: &[f64]) -> f64 {
    let mut b = vec![vec![0.0; l + 1]; p + 1];
    b[0][0] = 1.0;
    for n in 1..=p {
        for k in 1..=l.min(n) {
            let mut acc = 0.0;
            let mut binom = 1.0;
            for i in 1..=n - k + 1 {
                if i > 1 {
                    binom *= (n - i + 1) as f64 / (i - 1) as f64;
                }
                if let Some(&xi) = x.get(i - 1) {
                    acc += binom * xi * b[n - i][k - 1];
                }
            }
            b[n][k] = acc;
        }
    }
    b[p][l]
}

/// Cumulants `κ_1..κ_P` from raw moments `η_1..η_P`.
pub fn cumulants_from_moments(eta: &[f64]) -> Vec<f64> {
    (1..=eta.len())
        .map(|p| {
            (1..=p)
                .map(|l| {
                    let sign = if l % 2 == 1 { 1.0 } else { -1.0 };
                    let fact: f64 = (1..l).map(|t| t as f64).product();
                    sign * fact * partial_bell(p, l, eta)
                })
                .sum()
        })
        .collect()
}
