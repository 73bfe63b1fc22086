//! The k-component mixture model `p(z) = Σ_i c_i π_i(z)` and its samplers.

mod format;
mod histogram;
mod matrix;
mod sampling;
mod weights;

pub use format::{read_histogram_csv, read_pimx, write_histogram_csv, write_pimx};
pub use histogram::{BitstringHistogram, SideHistograms};
pub use matrix::{DistributionMatrix, RowKind};
pub use sampling::{
    dirichlet_row, sample_bitstrings_multinomial, sample_bitstrings_poissonized, sample_dirichlet_matrix,
    sample_multinomial_counts, sample_poisson_rates, sample_side_info,
};
pub use weights::{Constraint, ErrorWeights};

use crate::error::{Error, Result};

/// Negative mixture entries below this are rejected as infeasible.
pub const INFEASIBLE_TOL: f64 = 1e-9;

/// Evaluate `Π^T c`.
pub fn mixture_distribution(pi: &DistributionMatrix, c: &ErrorWeights) -> Result<Vec<f64>> {
    mixture_values(pi, &c.values)
}

/// `Π^T x` for a raw coefficient vector.
pub fn mixture_values(pi: &DistributionMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != pi.k() {
        return Err(Error::InvalidArgument(format!("weights have length {}, matrix has k={}", x.len(), pi.k())));
    }
    let mut p = vec![0.0; pi.d()];
    for (i, &ci) in x.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        for (pj, &v) in p.iter_mut().zip(pi.row(i)) {
            *pj += ci * v;
        }
    }
    if let Some((j, &v)) = p.iter().enumerate().find(|(_, &v)| v < -INFEASIBLE_TOL) {
        return Err(Error::InfeasibleMixture(format!("entry {j} is {v:e}")));
    }
    Ok(p)
}
