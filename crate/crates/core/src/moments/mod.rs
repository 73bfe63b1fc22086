//! Estimation of unlabeled weights when no side information is available.
//!
//! Pipeline: factorial-moment statistics → U-statistic cumulants → power
//! sums `m̂_p` → elementary symmetric polynomials → polynomial roots.

mod bell;
mod factorial;
mod newton;
mod roots;
mod ustat;

pub use bell::{cumulants_from_moments, partial_bell};
pub use factorial::{factorial_moment, factorial_moment_stats, FactorialMoments};
pub use newton::{elementary_symmetric, newton_coefficients, power_sums};
pub use roots::{fidelity_estimate, polynomial_roots, roots_and_estimate, sorted_loss};
pub use ustat::{cumulant_estimate, moment_vector, MAX_ORDER};

use crate::error::Result;
use crate::mixture::BitstringHistogram;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub m_hat: Vec<f64>,
    pub e_hat: Vec<f64>,
    pub roots: Vec<Complex64>,
    pub c_hat: Vec<f64>,
}

/// Full pipeline from a histogram to the sorted weight estimate.
pub fn moment_estimate(y: &BitstringHistogram, k: usize) -> Result<MomentEstimate> {
    let m = moment_vector(y, k)?;
    let e = newton_coefficients(&m);
    let mut est = roots_and_estimate(&e)?;
    est.m_hat = m;
    Ok(est)
}
