use crate::error::{invalid, Error, Result};
use crate::mixture::{BitstringHistogram, DistributionMatrix};

/// Columns of `Π` restricted to the support of a histogram, stored cell-major
/// (`a[j * k + i] = π_i(z_j)`), with the matching counts.
pub(crate) struct SupportColumns {
    pub k: usize,
    pub counts: Vec<f64>,
    pub a: Vec<f64>,
}

impl SupportColumns {
    pub fn new(pi: &DistributionMatrix, y: &BitstringHistogram) -> Result<Self> {
        if y.d() != pi.d() as u64 {
            return Err(invalid(format!("histogram d={} but matrix d={}", y.d(), pi.d())));
        }
        let k = pi.k();
        let s = y.support();
        let mut a = vec![0.0; s.len() * k];
        for i in 0..k {
            let row = pi.row(i);
            for (j, &(z, _)) in s.iter().enumerate() {
                a[j * k + i] = row[z as usize];
            }
        }
        Ok(SupportColumns { k, counts: s.iter().map(|&(_, c)| c as f64).collect(), a })
    }

    pub fn cells(&self) -> usize {
        self.counts.len()
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.a[j * self.k..(j + 1) * self.k]
    }

    /// `q_j = Σ_i x_i π_i(z_j)` on the support.
    pub fn mix(&self, x: &[f64], q: &mut Vec<f64>) {
        q.clear();
        q.extend((0..self.cells()).map(|j| self.col(j).iter().zip(x).map(|(a, b)| a * b).sum::<f64>()));
    }

    /// Every support cell must be reachable by some nonnegative weight.
    pub fn check_reachable(&self) -> Result<()> {
        for j in 0..self.cells() {
            if self.col(j).iter().all(|&v| v <= 0.0) {
                return Err(Error::Infeasible(format!(
                    "observed outcome {j} of the support has zero probability under every row"
                )));
            }
        }
        Ok(())
    }
}
