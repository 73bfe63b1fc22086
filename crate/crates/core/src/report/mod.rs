//! Conversion of fitted weights into fidelity, physical rates and error-budget
//! proportions.
//!
//! The order is fixed: fit, double-readout correction, fidelity, then rates.
//! Fidelity and proportions use the raw fit; rates use the corrected readout
//! weights. Clamping to `[0, 1]` happens only here.

mod render;

pub use render::render_markdown;

use crate::circuit::ErrorModelSpec;
use crate::error::{invalid, Error, Result};
use crate::estimators::Estimate;
use crate::labels::{ErrorKind, ErrorLabel};
use crate::mixture::Constraint;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// Overlap of a double readout row with the single readout row on either qubit.
pub const DOUBLE_READOUT_OVERLAP: f64 = 3.0 / 14.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub estimator: String,
    pub seeds: Vec<u64>,
    /// SHA-256 of the canonical JSON of the run configuration.
    pub config_hash: String,
    pub tool_version: String,
}

impl Provenance {
    pub fn new(estimator: impl Into<String>, seeds: Vec<u64>, config_json: &str) -> Self {
        Provenance {
            estimator: estimator.into(),
            seeds,
            config_hash: sha256_hex(config_json.as_bytes()),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub label: ErrorLabel,
    /// Fitted weight.
    pub c: f64,
    /// Weight after the double-readout correction (equal to `c` elsewhere).
    pub c_corrected: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalReport {
    pub fidelity: f64,
    pub fidelity_unclamped: f64,
    pub rates: Vec<RateEntry>,
    pub proportions: BTreeMap<String, f64>,
    pub white_noise_weight: Option<f64>,
    /// `1 − F̂ − F̂ log(1/F̂)`, the multi-error weight expected from `F̂` alone.
    pub white_noise_expected: Option<f64>,
    pub provenance: Provenance,
}

impl PhysicalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn coefficient(model: &ErrorModelSpec, label: &ErrorLabel) -> Result<f64> {
    match model.fidelity_coeff(label) {
        Some(Some(f)) => Ok(f),
        Some(None) => Err(Error::MissingCoefficient(format!("{label} (boundary source, no bulk coefficient)"))),
        None => Err(Error::MissingCoefficient(format!("{label} (not in the error model)"))),
    }
}

/// `ĉ_1 + Σ_{i>1} f_i ĉ_i` without clamping.
pub fn fidelity_unclamped(est: &Estimate, model: &ErrorModelSpec) -> Result<f64> {
    let mut f = 0.0;
    for (label, &c) in est.labels().iter().zip(est.values()) {
        f += if label.kind == ErrorKind::Ideal { c } else { coefficient(model, label)? * c };
    }
    Ok(f)
}

/// Many-body fidelity estimate, clamped to `[0, 1]`.
pub fn fidelity_from_estimate(est: &Estimate, model: &ErrorModelSpec) -> Result<f64> {
    Ok(fidelity_unclamped(est, model)?.clamp(0.0, 1.0))
}

/// `Σ_{k≠j} ĉ_double,jk` for each qubit `j`.
fn double_readout_totals(est: &Estimate) -> BTreeMap<usize, f64> {
    let mut totals = BTreeMap::new();
    for (label, &c) in est.labels().iter().zip(est.values()) {
        if label.kind == ErrorKind::DoubleReadout1010 {
            for &q in &label.qubits {
                *totals.entry(q).or_insert(0.0) += c;
            }
        }
    }
    totals
}

/// `ĉ_{1→0,j} ← ĉ_{1→0,j} − (3/14) Σ_{k≠j} ĉ_double,jk`; other entries untouched.
pub fn correct_double_readout(est: &Estimate) -> Result<Estimate> {
    let totals = double_readout_totals(est);
    if totals.is_empty() {
        return Ok(est.clone());
    }
    let values = est
        .labels()
        .iter()
        .zip(est.values())
        .map(|(label, &c)| match (&label.kind, label.qubits.as_slice()) {
            (ErrorKind::Readout10, [q]) => c - DOUBLE_READOUT_OVERLAP * totals.get(q).copied().unwrap_or(0.0),
            _ => c,
        })
        .collect();
    let mut diag = est.diagnostics.clone();
    diag.notes.push("single readout weights corrected for double readout overlap".into());
    let mut out = Estimate::new(values, est.labels().to_vec(), Constraint::Unconstrained, diag)?;
    out.stderr = est.stderr.clone();
    Ok(out)
}

/// `Γ̂_i = ĉ_i/(F̂ + ĉ_i)` clamped to `[0, 1]`, for every single-event source.
/// The ideal and white-noise rows are skipped.
pub fn physical_rates(est: &Estimate, fidelity: f64) -> Result<Vec<(ErrorLabel, f64)>> {
    let mut out = Vec::new();
    for (label, &c) in est.labels().iter().zip(est.values()) {
        if matches!(label.kind, ErrorKind::Ideal | ErrorKind::WhiteNoise) {
            continue;
        }
        let den = fidelity + c;
        if !(den > 0.0) {
            return Err(Error::DegenerateRate(format!("{label}: F̂ + ĉ = {den}")));
        }
        out.push((label.clone(), (c / den).clamp(0.0, 1.0)));
    }
    Ok(out)
}

fn class_of(kind: &ErrorKind) -> Option<&'static str> {
    Some(match kind {
        ErrorKind::Ideal => "fidelity",
        ErrorKind::PauliX | ErrorKind::PauliY | ErrorKind::PauliZ => "pauli",
        ErrorKind::StatePrep => "state_prep",
        ErrorKind::Dephase1q => "dephase_1q",
        ErrorKind::Dephase2q => "dephase_2q",
        ErrorKind::FlipFlop2q => "flip_flop",
        ErrorKind::Readout10 | ErrorKind::Readout01 => "readout",
        ErrorKind::DoubleReadout1010 => "double_readout",
        ErrorKind::WhiteNoise => "white_noise",
        ErrorKind::Custom(_) => return None,
    })
}

/// Share of the measured signal attributed to each error class.
///
/// Fidelity enters as `F̂`; two-qubit errors as `(3/4)ĉ`; single readout as
/// `(1/2)ĉ` less the double-readout overlap; double readout as `(3/7 − 1/4)ĉ`;
/// everything else unchanged. With the white-noise row present the shares
/// sum to the total weight of the probability rows, i.e. one.
pub fn proportions(est: &Estimate, model: &ErrorModelSpec) -> Result<BTreeMap<String, f64>> {
    let totals = double_readout_totals(est);
    let mut out = BTreeMap::new();
    let fid = fidelity_unclamped(est, model)?;
    out.insert("fidelity".to_string(), fid);
    for (label, &c) in est.labels().iter().zip(est.values()) {
        let class = class_of(&label.kind).ok_or_else(|| Error::MissingCoefficient(format!("{label} (no error class)")))?;
        let share = match label.kind {
            ErrorKind::Ideal => continue,
            ErrorKind::Dephase2q | ErrorKind::FlipFlop2q => 0.75 * c,
            ErrorKind::Readout10 => {
                0.5 * c - DOUBLE_READOUT_OVERLAP * label.qubits.first().and_then(|q| totals.get(q)).copied().unwrap_or(0.0)
            }
            ErrorKind::Readout01 => 0.5 * c,
            ErrorKind::DoubleReadout1010 => (3.0 / 7.0 - 0.25) * c,
            _ => c,
        };
        *out.entry(class.to_string()).or_insert(0.0) += share;
    }
    Ok(out)
}

/// `1 − F̂ − F̂ log(1/F̂)`.
pub fn white_noise_expectation(fidelity: f64) -> Result<f64> {
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(invalid(format!("fidelity {fidelity} must lie in (0, 1]")));
    }
    Ok(1.0 - fidelity + fidelity * fidelity.ln())
}

/// Assemble the full report in the fixed order.
pub fn build_report(est: &Estimate, model: &ErrorModelSpec, provenance: Provenance) -> Result<PhysicalReport> {
    let fidelity_unclamped = fidelity_unclamped(est, model)?;
    let fidelity = fidelity_unclamped.clamp(0.0, 1.0);
    let corrected = correct_double_readout(est)?;
    let gammas = physical_rates(&corrected, fidelity)?;
    let mut gi = gammas.into_iter().peekable();
    let mut rates = Vec::new();
    for ((label, &c), &cc) in est.labels().iter().zip(est.values()).zip(corrected.values()) {
        if let Some((l, g)) = gi.next_if(|(l, _)| l == label) {
            rates.push(RateEntry { label: l, c, c_corrected: cc, gamma: g });
        }
    }
    let white_noise_weight = est.values.value_of(&ErrorLabel::white_noise());
    Ok(PhysicalReport {
        fidelity,
        fidelity_unclamped,
        rates,
        proportions: proportions(est, model)?,
        white_noise_weight,
        white_noise_expected: if fidelity > 0.0 { Some(white_noise_expectation(fidelity)?) } else { None },
        provenance,
    })
}
