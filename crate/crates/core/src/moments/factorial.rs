use crate::error::{invalid, Result};
use crate::mixture::BitstringHistogram;

/// `Y!/(n^r (Y−r)!)`, the unbiased estimate of `λ^r` for `Y ~ Poisson(nλ)`.
pub fn factorial_moment(count: u64, n: f64, r: u32) -> f64 {
    if count < r as u64 {
        return 0.0;
    }
    (0..r as u64).map(|t| (count - t) as f64 / n).product()
}

/// Per-outcome statistics `T_{j,r}`: a constant off the support plus values
/// on the support (aligned with `y.support()`).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialMoments {
    pub background: f64,
    pub support: Vec<f64>,
}

pub fn factorial_moment_stats(y: &BitstringHistogram, r: u32) -> Result<FactorialMoments> {
    if r == 0 {
        return Err(invalid("factorial moment order must be at least 1"));
    }
    if r == 1 {
        let v = 1.0 / y.d() as f64;
        return Ok(FactorialMoments { background: v, support: vec![v; y.support_len()] });
    }
    let n = y.total() as f64;
    Ok(FactorialMoments {
        background: 0.0,
        support: y.support().iter().map(|&(_, c)| factorial_moment(c, n, r)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(factorial_moment(0, 10.0, 2), 0.0);
        assert!((factorial_moment(3, 10.0, 2) - 0.06).abs() < 1e-15);
        let y = BitstringHistogram::from_dense(&[3, 0, 7]);
        assert!(factorial_moment_stats(&y, 0).is_err());
        let t1 = factorial_moment_stats(&y, 1).unwrap();
        assert_eq!(t1.background, 1.0 / 3.0);
        let t2 = factorial_moment_stats(&y, 2).unwrap();
        assert_eq!(t2.background, 0.0);
        assert!((t2.support[1] - 42.0 / 100.0).abs() < 1e-15);
    }
}
