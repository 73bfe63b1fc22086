use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Sparse outcome counts over `d` outcomes.
///
/// Counts are kept as `(index, count)` pairs sorted by index with no zeros,
/// which keeps summation order (and therefore every estimate) deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitstringHistogram {
    d: u64,
    counts: Vec<(u64, u64)>,
    total: u64,
}

impl BitstringHistogram {
    pub fn empty(d: u64) -> Self {
        BitstringHistogram { d, counts: Vec::new(), total: 0 }
    }

    /// Build from possibly unsorted, possibly repeated `(index, count)` pairs.
    pub fn from_pairs(d: u64, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut counts: Vec<(u64, u64)> = pairs.into_iter().filter(|&(_, c)| c > 0).collect();
        if let Some(&(j, _)) = counts.iter().find(|&&(j, _)| j >= d) {
            return Err(invalid(format!("outcome {j} out of range for d={d}")));
        }
        counts.sort_unstable_by_key(|&(j, _)| j);
        counts.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        let total = counts.iter().map(|&(_, c)| c).sum();
        Ok(BitstringHistogram { d, counts, total })
    }

    pub fn from_dense(counts: &[u64]) -> Self {
        let pairs: Vec<(u64, u64)> =
            counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(j, &c)| (j as u64, c)).collect();
        let total = pairs.iter().map(|&(_, c)| c).sum();
        BitstringHistogram { d: counts.len() as u64, counts: pairs, total }
    }

    /// Histogram of raw outcome samples.
    pub fn from_samples(d: u64, samples: &[u64]) -> Result<Self> {
        Self::from_pairs(d, samples.iter().map(|&z| (z, 1)))
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support(&self) -> &[(u64, u64)] {
        &self.counts
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, j: u64) -> u64 {
        self.counts.binary_search_by_key(&j, |&(i, _)| i).map_or(0, |p| self.counts[p].1)
    }

    pub fn to_dense(&self) -> Vec<u64> {
        let mut v = vec![0; self.d as usize];
        for &(j, c) in &self.counts {
            v[j as usize] = c;
        }
        v
    }

    /// `Σ_j Y_j V_j` over the common support, by a sorted merge.
    pub fn dot(&self, other: &BitstringHistogram) -> u64 {
        let (a, b) = (&self.counts, &other.counts);
        let (mut i, mut j, mut acc) = (0, 0, 0u64);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Relabel outcomes by `z -> perm[z]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() as u64 != self.d {
            return Err(invalid("permutation length differs from d"));
        }
        Self::from_pairs(self.d, self.counts.iter().map(|&(j, c)| (perm[j as usize] as u64, c)))
    }
}

/// Reference samples drawn from each row of `Π`, all with the same size `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideHistograms {
    d: u64,
    m: u64,
    hists: Vec<BitstringHistogram>,
}

impl SideHistograms {
    pub fn new(d: u64, m: u64, hists: Vec<BitstringHistogram>) -> Result<Self> {
        if hists.is_empty() {
            return Err(invalid("side information needs at least one component"));
        }
        for (i, h) in hists.iter().enumerate() {
            if h.d() != d {
                return Err(invalid(format!("component {i} has d={} not {d}", h.d())));
            }
            if h.total() != m {
                return Err(invalid(format!("component {i} has total {} not {m}", h.total())));
            }
        }
        Ok(SideHistograms { d, m, hists })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> usize {
        self.hists.len()
    }

    pub fn component(&self, i: usize) -> &BitstringHistogram {
        &self.hists[i]
    }

    pub fn components(&self) -> &[BitstringHistogram] {
        &self.hists
    }

    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let hists = self.hists.iter().map(|h| h.permute(perm)).collect::<Result<Vec<_>>>()?;
        Ok(SideHistograms { d: self.d, m: self.m, hists })
    }
}
