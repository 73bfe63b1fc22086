use super::{BitstringHistogram, DistributionMatrix, RowKind, SideHistograms};
use crate::error::{invalid, Error, Result};
use crate::labels::ErrorLabel;
use crate::rng::{derive_seed, rng, Rng};
use rand::Rng as _;
use rand_distr::{Binomial, Distribution, Exp1, Poisson};
use rand_distr::weighted::WeightedAliasIndex;
use rayon::prelude::*;

/// One flat-Dirichlet row: i.i.d. Exp(1) draws normalized to sum 1.
pub fn dirichlet_row(d: usize, r: &mut Rng) -> Vec<f64> {
    let mut row: Vec<f64> = (0..d).map(|_| r.sample::<f64, _>(Exp1)).collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}

/// `k` independent flat-Dirichlet rows over `d` outcomes.
///
/// Row 0 is labeled ideal, the rest `row<i>`.
pub fn sample_dirichlet_matrix(k: usize, d: usize, seed: u64) -> Result<DistributionMatrix> {
    if k == 0 || d < 2 {
        return Err(invalid(format!("need k >= 1 and d >= 2, got k={k}, d={d}")));
    }
    let mut r = rng(seed);
    let mut data = Vec::with_capacity(k * d);
    for _ in 0..k {
        data.extend(dirichlet_row(d, &mut r));
    }
    let labels = (0..k)
        .map(|i| if i == 0 { ErrorLabel::ideal() } else { ErrorLabel::custom(format!("row{i}")) })
        .collect();
    DistributionMatrix::new(d, data, labels, vec![RowKind::Probability; k])
}

fn check_probability(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(invalid("empty probability vector"));
    }
    if p.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return Err(invalid("probability vector has negative or non-finite entries"));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("probability vector sums to {s}")));
    }
    Ok(())
}

/// Dense multinomial counts.
///
/// Uses sequential conditional binomials when `n >= d` (cost O(d)) and an
/// alias table otherwise (cost O(d + n)).
pub fn sample_multinomial_counts(p: &[f64], n: u64, r: &mut Rng) -> Result<Vec<u64>> {
    check_probability(p)?;
    let d = p.len();
    let mut counts = vec![0u64; d];
    if n == 0 {
        return Ok(counts);
    }
    if n as usize >= d {
        let mut remaining = n;
        let mut mass: f64 = p.iter().map(|v| v.max(0.0)).sum();
        for (j, &pj) in p.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let pj = pj.max(0.0);
            let q = if j + 1 == d || mass <= 0.0 { 1.0 } else { (pj / mass).clamp(0.0, 1.0) };
            let c = if q >= 1.0 {
                remaining
            } else if q <= 0.0 {
                0
            } else {
                Binomial::new(remaining, q).map_err(|e| Error::Numerical(e.to_string()))?.sample(r)
            };
            counts[j] = c;
            remaining -= c;
            mass -= pj;
        }
    } else {
        let w: Vec<f64> = p.iter().map(|v| v.max(0.0)).collect();
        let alias = WeightedAliasIndex::new(w).map_err(|e| invalid(e.to_string()))?;
        for _ in 0..n {
            counts[alias.sample(r)] += 1;
        }
    }
    Ok(counts)
}

/// `n` i.i.d. draws from `p`.
pub fn sample_bitstrings_multinomial(p: &[f64], n: u64, seed: u64) -> Result<BitstringHistogram> {
    let counts = sample_multinomial_counts(p, n, &mut rng(seed))?;
    Ok(BitstringHistogram::from_dense(&counts))
}

/// Independent `Y_j ~ Poisson(rates_j)`; rates need not sum to anything.
pub fn sample_poisson_rates(rates: &[f64], seed: u64) -> Result<BitstringHistogram> {
    if rates.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(invalid("Poisson rates must be finite and nonnegative"));
    }
    let mut r = rng(seed);
    let mut pairs = Vec::new();
    for (j, &lam) in rates.iter().enumerate() {
        if lam > 0.0 {
            let y: f64 = Poisson::new(lam).map_err(|e| Error::Numerical(e.to_string()))?.sample(&mut r);
            if y > 0.0 {
                pairs.push((j as u64, y as u64));
            }
        }
    }
    BitstringHistogram::from_pairs(rates.len() as u64, pairs)
}

/// Normalized Poisson model: `Y_j ~ Poisson(n p_j)` independently.
pub fn sample_bitstrings_poissonized(p: &[f64], n: f64, seed: u64) -> Result<BitstringHistogram> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(invalid(format!("Poisson rate n={n} must be nonnegative")));
    }
    check_probability(p)?;
    let rates: Vec<f64> = p.iter().map(|&v| n * v.max(0.0)).collect();
    sample_poisson_rates(&rates, seed)
}

/// `m` reference draws from every row; row `i` uses seed `derive_seed(seed, i)`.
pub fn sample_side_info(pi: &DistributionMatrix, m: u64, seed: u64) -> Result<SideHistograms> {
    if !pi.all_probability() {
        return Err(Error::UnsupportedRowKind("side information needs probability rows only".into()));
    }
    let d = pi.d() as u64;
    let hists = (0..pi.k())
        .into_par_iter()
        .map(|i| {
            if m == 0 {
                return Ok(BitstringHistogram::empty(d));
            }
            sample_bitstrings_multinomial(pi.row(i), m, derive_seed(seed, i as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    SideHistograms::new(d, m, hists)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_rows_are_normalized_and_deterministic() {
        let a = sample_dirichlet_matrix(3, 1024, 1).unwrap();
        let b = sample_dirichlet_matrix(3, 1024, 1).unwrap();
        assert_eq!(a, b);
        for i in 0..3 {
            let mean = a.row(i).iter().sum::<f64>() / 1024.0;
            assert!((mean - 1.0 / 1024.0).abs() < 1e-15);
        }
        let one = sample_dirichlet_matrix(1, 4, 7).unwrap();
        assert!(one.row(0).iter().all(|&v| v > 0.0));
        assert!(sample_dirichlet_matrix(0, 4, 1).is_err());
        assert!(sample_dirichlet_matrix(1, 1, 1).is_err());
    }

    #[test]
    fn point_mass_sampling() {
        let h = sample_bitstrings_multinomial(&[1.0, 0.0, 0.0], 100, 3).unwrap();
        assert_eq!(h.support(), &[(0, 100)]);
        let h = sample_bitstrings_multinomial(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0], 3, 3).unwrap();
        assert_eq!(h.support(), &[(2, 3)]);
    }

    #[test]
    fn fair_coin_concentrates() {
        let n = 1_000_000u64;
        let h = sample_bitstrings_multinomial(&[0.5, 0.5], n, 11).unwrap();
        let sigma = (n as f64 / 4.0).sqrt();
        assert_eq!(h.total(), n);
        assert!((h.get(0) as f64 - n as f64 / 2.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn both_multinomial_paths_are_unbiased() {
        let p = [0.31, 0.27, 0.23, 0.19];
        for n in [3u64, 100_000] {
            let reps = 200;
            let mut sums = [0.0; 4];
            let mut sq = [0.0; 4];
            for s in 0..reps {
                let h = sample_bitstrings_multinomial(&p, n, derive_seed(5, s)).unwrap();
                assert_eq!(h.total(), n);
                for j in 0..4 {
                    let f = h.get(j as u64) as f64 / n as f64;
                    sums[j] += f;
                    sq[j] += f * f;
                }
            }
            for j in 0..4 {
                let mean = sums[j] / reps as f64;
                let var = sq[j] / reps as f64 - mean * mean;
                let se = (var / reps as f64).sqrt().max(1e-12);
                assert!((mean - p[j]).abs() < 3.0 * se + 1e-12, "n={n} j={j} mean={mean}");
            }
        }
    }

    #[test]
    fn poissonized_edge_cases() {
        let h = sample_bitstrings_poissonized(&[0.5, 0.5], 0.0, 1).unwrap();
        assert_eq!(h.total(), 0);
        assert!(sample_bitstrings_poissonized(&[0.5, 0.5], -1.0, 1).is_err());
        assert!(sample_bitstrings_multinomial(&[0.5, 0.6], 10, 1).is_err());
    }

    #[test]
    fn side_info_point_mass_and_empty() {
        let pi = DistributionMatrix::from_rows(
            vec![vec![0.0, 0.0, 0.0, 1.0], vec![0.25; 4]],
            vec![ErrorLabel::ideal(), ErrorLabel::custom("u")],
            vec![RowKind::Probability; 2],
        )
        .unwrap();
        let v = sample_side_info(&pi, 7, 9).unwrap();
        assert_eq!(v.component(0).support(), &[(3, 7)]);
        let v0 = sample_side_info(&pi, 0, 9).unwrap();
        assert!(v0.components().iter().all(|h| h.total() == 0));
        let signed = DistributionMatrix::from_rows(
            vec![vec![0.5, 0.5], vec![0.1, -0.1]],
            vec![ErrorLabel::ideal(), ErrorLabel::custom("ro")],
            vec![RowKind::Probability, RowKind::SignedPerturbation],
        )
        .unwrap();
        assert!(matches!(sample_side_info(&signed, 5, 1), Err(Error::UnsupportedRowKind(_))));
    }
}
