use crate::error::{invalid, Result};
use crate::labels::ErrorLabel;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    Simplex,
    NonnegativeCone,
    Unconstrained,
}

pub const SIMPLEX_SUM_TOL: f64 = 1e-9;
pub const NEGATIVE_TOL: f64 = 1e-12;

/// The coefficient vector `c` with one label per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorWeights {
    pub values: Vec<f64>,
    pub labels: Vec<ErrorLabel>,
    pub constraint: Constraint,
}

impl ErrorWeights {
    pub fn new(values: Vec<f64>, labels: Vec<ErrorLabel>, constraint: Constraint) -> Result<Self> {
        let w = ErrorWeights { values, labels, constraint };
        w.validate()?;
        Ok(w)
    }

    pub fn simplex(values: Vec<f64>, labels: Vec<ErrorLabel>) -> Result<Self> {
        Self::new(values, labels, Constraint::Simplex)
    }

    pub fn unconstrained(values: Vec<f64>, labels: Vec<ErrorLabel>) -> Result<Self> {
        Self::new(values, labels, Constraint::Unconstrained)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.labels.len() {
            return Err(invalid(format!("{} values but {} labels", self.values.len(), self.labels.len())));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite weight"));
        }
        match self.constraint {
            Constraint::Simplex => {
                let s: f64 = self.values.iter().sum();
                if (s - 1.0).abs() > SIMPLEX_SUM_TOL {
                    return Err(invalid(format!("simplex weights sum to {s}")));
                }
                if self.values.iter().any(|&v| v < -NEGATIVE_TOL) {
                    return Err(invalid("simplex weights must be nonnegative"));
                }
            }
            Constraint::NonnegativeCone => {
                if self.values.iter().any(|&v| v < -NEGATIVE_TOL) {
                    return Err(invalid("cone weights must be nonnegative"));
                }
            }
            Constraint::Unconstrained => {}
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value_of(&self, label: &ErrorLabel) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.values[i])
    }
}
