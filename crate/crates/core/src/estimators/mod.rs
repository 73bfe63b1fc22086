//! Estimators of the mixture weights `c`.
//!
//! With exact rows (`Π` known): [`xeb_estimate`], [`threshold`],
//! [`mle_multinomial`], [`mle_poisson_ridge`]. With `m` reference samples per
//! row: [`collision_estimate`], [`eiv_least_squares`], [`variational_em`].

mod bootstrap;
mod collision;
mod eiv;
mod mle;
mod poisson;
mod simplex;
mod support;
mod threshold;
mod vem;
mod xeb;

pub use bootstrap::{bootstrap_stderr, resample_histogram};
pub use collision::collision_estimate;
pub use eiv::{eiv_gram, eiv_least_squares};
pub use mle::{mle_multinomial, multinomial_log_likelihood};
pub use poisson::{mle_poisson_ridge, poisson_objective};
pub use simplex::project_simplex;
pub use threshold::{apply_threshold, cv_lambda, split_histogram, threshold, threshold_cv};
pub use vem::{free_entropy, variational_em, vem_weights};
pub use xeb::xeb_estimate;

use crate::error::{invalid, Result};
use crate::labels::ErrorLabel;
use crate::mixture::{Constraint, ErrorWeights};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ThresholdChoice {
    Fixed(f64),
    CrossValidated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdKind {
    Hard,
    Soft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub threshold: ThresholdChoice,
    pub cv_folds: usize,
    /// Seed for the fold split used by cross-validation.
    pub cv_seed: u64,
    pub max_iter: usize,
    /// Convergence tolerance on `‖Δx‖₁`.
    pub tol: f64,
    pub ridge: f64,
    /// Extrapolated EM steps for the multinomial MLE.
    pub accelerate: bool,
    /// Poisson rate used by the Poisson likelihood; defaults to the observed total.
    pub poisson_rate: Option<f64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            threshold: ThresholdChoice::CrossValidated,
            cv_folds: 2,
            cv_seed: 0,
            max_iter: 10_000,
            tol: 1e-10,
            ridge: 1e-8,
            accelerate: true,
            poisson_rate: None,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if let ThresholdChoice::Fixed(l) = self.threshold {
            if !(l >= 0.0) {
                return Err(invalid(format!("threshold {l} must be nonnegative")));
            }
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if self.cv_folds != 2 {
            return Err(invalid("only two-fold cross-validation is supported"));
        }
        if !(self.ridge >= 0.0) || !(self.tol > 0.0) {
            return Err(invalid("ridge must be nonnegative and tol positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Diagnostics {
    pub fn closed_form() -> Self {
        Diagnostics { iterations: 0, objective_trace: vec![], converged: true, lambda: None, notes: vec![] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub values: ErrorWeights,
    pub stderr: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

/// JSON shape of an [`Estimate`].
#[derive(Serialize, Deserialize)]
struct EstimateFile {
    labels: Vec<ErrorLabel>,
    values: Vec<f64>,
    constraint: Constraint,
    stderr: Option<Vec<f64>>,
    diagnostics: Diagnostics,
}

impl Estimate {
    pub fn new(values: Vec<f64>, labels: Vec<ErrorLabel>, constraint: Constraint, diagnostics: Diagnostics) -> Result<Self> {
        Ok(Estimate { values: ErrorWeights::new(values, labels, constraint)?, stderr: None, diagnostics })
    }

    pub fn values(&self) -> &[f64] {
        &self.values.values
    }

    pub fn labels(&self) -> &[ErrorLabel] {
        &self.values.labels
    }

    pub fn to_json(&self) -> Result<String> {
        let f = EstimateFile {
            labels: self.values.labels.clone(),
            values: self.values.values.clone(),
            constraint: self.values.constraint,
            stderr: self.stderr.clone(),
            diagnostics: self.diagnostics.clone(),
        };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: EstimateFile = serde_json::from_str(s)?;
        if let Some(se) = &f.stderr {
            if se.len() != f.values.len() || se.iter().any(|&v| !(v >= 0.0)) {
                return Err(invalid("stderr must match values and be nonnegative"));
            }
        }
        Ok(Estimate {
            values: ErrorWeights::new(f.values, f.labels, f.constraint)?,
            stderr: f.stderr,
            diagnostics: f.diagnostics,
        })
    }
}

/// Clamp round-off negatives and rescale onto the simplex.
pub(crate) fn renormalize_simplex(x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
}

pub(crate) fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
