use super::{Diagnostics, Estimate};
use crate::error::{invalid, Error, Result};
use crate::labels::ErrorLabel;
use crate::mixture::{BitstringHistogram, Constraint, SideHistograms};
use rayon::prelude::*;

/// Collision counting: `ĉ_i = ((d+1)/(nm)) Σ_j Y_j V_ij − 1`.
///
/// Uses only the sparse supports, so memory does not grow with `d`.
pub fn collision_estimate(y: &BitstringHistogram, v: &SideHistograms, labels: &[ErrorLabel]) -> Result<Estimate> {
    if v.m() == 0 {
        return Err(Error::NeedsSideInfo("collision estimator needs m >= 1 reference samples".into()));
    }
    if y.total() == 0 {
        return Err(Error::EmptyData("collision estimator needs at least one sample".into()));
    }
    if y.d() != v.d() {
        return Err(invalid(format!("histogram d={} but side information d={}", y.d(), v.d())));
    }
    if labels.len() != v.k() {
        return Err(invalid("one label per side-information component is required"));
    }
    let scale = (y.d() as f64 + 1.0) / (y.total() as f64 * v.m() as f64);
    let values: Vec<f64> = v.components().par_iter().map(|vi| scale * y.dot(vi) as f64 - 1.0).collect();
    Estimate::new(values, labels.to_vec(), Constraint::Unconstrained, Diagnostics::closed_form())
}
