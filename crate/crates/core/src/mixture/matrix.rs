use crate::error::{invalid, Result};
use crate::labels::ErrorLabel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Probability,
    SignedPerturbation,
}

pub const PROB_SUM_TOL: f64 = 1e-12;

/// Dense k×d matrix `Π` with one labeled row per error trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionMatrix {
    k: usize,
    d: usize,
    data: Vec<f64>,
    labels: Vec<ErrorLabel>,
    kinds: Vec<RowKind>,
}

impl DistributionMatrix {
    /// Build from row-major data, validating row invariants.
    pub fn new(d: usize, data: Vec<f64>, labels: Vec<ErrorLabel>, kinds: Vec<RowKind>) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(invalid("matrix needs at least one row"));
        }
        if d < 2 {
            return Err(invalid(format!("outcome space size d={d} must be at least 2")));
        }
        if kinds.len() != k || data.len() != k * d {
            return Err(invalid(format!(
                "shape mismatch: {} labels, {} kinds, {} values for d={d}",
                k,
                kinds.len(),
                data.len()
            )));
        }
        let m = DistributionMatrix { k, d, data, labels, kinds };
        m.validate()?;
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<ErrorLabel>, kinds: Vec<RowKind>) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != d) {
            return Err(invalid("rows have unequal lengths"));
        }
        Self::new(d, rows.concat(), labels, kinds)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.k {
            let row = self.row(i);
            if row.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("row {i} has non-finite entries")));
            }
            let sum: f64 = row.iter().sum();
            match self.kinds[i] {
                RowKind::Probability => {
                    if let Some(v) = row.iter().find(|&&v| v < 0.0) {
                        return Err(invalid(format!("probability row {i} has negative entry {v:e}")));
                    }
                    if (sum - 1.0).abs() > PROB_SUM_TOL {
                        return Err(invalid(format!("probability row {i} sums to {sum}")));
                    }
                }
                RowKind::SignedPerturbation => {
                    if sum.abs() > PROB_SUM_TOL {
                        return Err(invalid(format!("signed row {i} sums to {sum:e}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> &[ErrorLabel] {
        &self.labels
    }

    pub fn kinds(&self) -> &[RowKind] {
        &self.kinds
    }

    pub fn all_probability(&self) -> bool {
        self.kinds.iter().all(|k| *k == RowKind::Probability)
    }

    /// Row sums: 1 for probability rows, 0 for signed rows.
    pub fn row_sums(&self) -> Vec<f64> {
        self.kinds
            .iter()
            .map(|k| match k {
                RowKind::Probability => 1.0,
                RowKind::SignedPerturbation => 0.0,
            })
            .collect()
    }

    /// Column `j` gathered across rows.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.k).map(|i| self.get(i, j)).collect()
    }

    /// Keep a subset of rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(idx.len() * self.d);
        for &i in idx {
            if i >= self.k {
                return Err(invalid(format!("row {i} out of range")));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(
            self.d,
            data,
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
            idx.iter().map(|&i| self.kinds[i]).collect(),
        )
    }

    /// Apply an outcome permutation `z -> perm[z]` to every row.
    pub fn permute_outcomes(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.d {
            return Err(invalid("permutation length differs from d"));
        }
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.k {
            for (j, &pj) in perm.iter().enumerate() {
                data[i * self.d + pj] = self.get(i, j);
            }
        }
        Self::new(self.d, data, self.labels.clone(), self.kinds.clone())
    }
}
