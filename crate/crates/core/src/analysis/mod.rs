//! Hypothesis tests and Monte Carlo harnesses built on the estimators.

mod correlated;
mod gof;
mod gradient;
pub mod scenarios;
pub mod stats;
mod sweep;

pub use correlated::correlated_error_matrix;
pub use gof::{chi2_gof, chi2_statistic, GofResult};
pub use gradient::{gradient_test, gradient_test_from_null, layer_slope, Alternative, GradientTestResult};
pub use sweep::{risk_sweep, RiskCell, RiskCurve, SamplingModel, Scenario, SweepEstimator, TruthMode};
