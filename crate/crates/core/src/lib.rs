//! Learning incoherent error rates from random-circuit-sampling data.
//!
//! The crate is organised around the k-component mixture `p = Π^T c`:
//!
//! - [`mixture`]: the model itself, Dirichlet rows, histograms and samplers.
//! - [`circuit`]: statevector simulation that builds labeled `Π` matrices.
//! - [`estimators`]: estimators of `c` given `Π` or reference samples.
//! - [`moments`]: estimation of unlabeled weights with no side information.
//! - [`analysis`]: hypothesis tests, goodness of fit and risk sweeps.
//! - [`report`]: conversion of `ĉ` into fidelity and physical rates.

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod estimators;
pub mod labels;
pub mod mixture;
pub mod moments;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use labels::{ErrorKind, ErrorLabel};
