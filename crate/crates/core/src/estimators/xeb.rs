use super::{Diagnostics, Estimate};
use crate::error::{invalid, Error, Result};
use crate::mixture::{BitstringHistogram, Constraint, DistributionMatrix};
use rayon::prelude::*;

/// Generalised linear XEB: `ĉ_i = (d/n) Σ_j Y_j π_i(z_j) − 1` over the support.
pub fn xeb_estimate(pi: &DistributionMatrix, y: &BitstringHistogram) -> Result<Estimate> {
    if y.d() != pi.d() as u64 {
        return Err(invalid(format!("histogram d={} but matrix d={}", y.d(), pi.d())));
    }
    if y.total() == 0 {
        return Err(Error::EmptyData("XEB needs at least one sample".into()));
    }
    let scale = pi.d() as f64 / y.total() as f64;
    let values: Vec<f64> = (0..pi.k())
        .into_par_iter()
        .map(|i| {
            let row = pi.row(i);
            scale * y.support().iter().map(|&(z, c)| c as f64 * row[z as usize]).sum::<f64>() - 1.0
        })
        .collect();
    Estimate::new(values, pi.labels().to_vec(), Constraint::Unconstrained, Diagnostics::closed_form())
}
