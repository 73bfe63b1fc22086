//! Synthetic truths used by the harnesses: planted rates on circuit-derived rows.

use super::correlated_error_matrix;
use crate::circuit::{build_pi_matrix, build_pi_matrix_with, pauli_model, BuildOptions, CircuitSpec, ErrorModelSpec, ErrorSource, Placement};
use crate::error::{invalid, Result};
use crate::estimators::{mle_multinomial, Estimate, EstimatorConfig};
use crate::labels::{ErrorKind, ErrorLabel};
use crate::mixture::{
    mixture_distribution, sample_bitstrings_multinomial, BitstringHistogram, Constraint, DistributionMatrix, ErrorWeights,
};
use crate::rng::{derive_seed, rng};
use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

fn multiplicity(s: &ErrorSource) -> usize {
    match &s.placement {
        Placement::Gate { layers } => layers.len(),
        _ => 1,
    }
}

/// Mixture weights of independent single-event sources.
///
/// A source with per-event rate `Γ` applied at `L` places contributes
/// `c = F · L Γ/(1−Γ)` with `F = Π (1−Γ)^L`; the white-noise row absorbs all
/// multi-event probability. `rates` aligns with `model.sources`; the entry of
/// the white-noise source is ignored.
pub fn weights_from_rates(model: &ErrorModelSpec, rates: &[f64]) -> Result<ErrorWeights> {
    if rates.len() != model.sources.len() {
        return Err(invalid("one rate per source is required"));
    }
    let white = model.sources.iter().position(|s| s.label.kind == ErrorKind::WhiteNoise);
    let Some(white) = white else {
        return Err(invalid("planted rates need a white-noise row to absorb multi-event probability"));
    };
    let mut log_f = 0.0;
    for (i, (s, &g)) in model.sources.iter().zip(rates).enumerate() {
        if i == white {
            continue;
        }
        if !(0.0..1.0).contains(&g) {
            return Err(invalid(format!("rate {g} of {} must lie in [0, 1)", s.label)));
        }
        log_f += multiplicity(s) as f64 * (1.0 - g).ln();
    }
    let f = log_f.exp();
    let mut values = vec![f];
    let mut labels = vec![ErrorLabel::ideal()];
    let mut prob_mass = f;
    for (i, (s, &g)) in model.sources.iter().zip(rates).enumerate() {
        let c = if i == white { 0.0 } else { f * multiplicity(s) as f64 * g / (1.0 - g) };
        if !s.label.kind.is_readout() {
            prob_mass += c;
        }
        values.push(c);
        labels.push(s.label.clone());
    }
    values[white + 1] = 1.0 - prob_mass;
    if values[white + 1] < 0.0 {
        return Err(invalid("rates too large: single events exceed total probability"));
    }
    ErrorWeights::new(values, labels, Constraint::Unconstrained)
}

/// Layer-resolved Pauli errors whose rates may grow linearly with depth.
#[derive(Debug, Clone)]
pub struct TimeDependence {
    pub spec: CircuitSpec,
    pub model: ErrorModelSpec,
    pub pi: DistributionMatrix,
    /// Number of noisy layers; the circuit has one more, noiseless, final layer.
    pub layers: usize,
    /// Scale of the per-source rate in the first and last layer of the growing model.
    pub eps_first: f64,
    pub eps_last: f64,
    /// Constant scale of the null model.
    pub eps_null: f64,
}

impl TimeDependence {
    /// X, Y and Z after each of `layers` chain layers, plus white noise.
    ///
    /// A Pauli after the final layer is invisible (Z) or aliased (X vs Y) in
    /// the computational basis, so a noiseless layer closes the circuit.
    pub fn new(n_qubits: usize, layers: usize, gate_seed: u64, eps_first: f64, eps_last: f64, eps_null: f64) -> Result<Self> {
        let spec = CircuitSpec::chain(n_qubits, layers + 1, gate_seed);
        let model = pauli_model(&spec, 0..layers, true);
        let pi = build_pi_matrix(&spec, &model)?;
        Ok(TimeDependence { spec, model, pi, layers, eps_first, eps_last, eps_null })
    }

    fn eps(&self, layer: usize, growing: bool) -> f64 {
        if !growing {
            return self.eps_null;
        }
        let t = if self.layers > 1 { layer as f64 / (self.layers - 1) as f64 } else { 0.0 };
        self.eps_first + (self.eps_last - self.eps_first) * t
    }

    /// Per-source rates drawn from `U[ε_l/4, 3ε_l/4]`.
    pub fn rates(&self, growing: bool, seed: u64) -> Vec<f64> {
        let mut r = rng(seed);
        self.model
            .sources
            .iter()
            .map(|s| match s.label.layer {
                Some(l) => {
                    let e = self.eps(l, growing);
                    r.random_range(0.25 * e..=0.75 * e)
                }
                None => 0.0,
            })
            .collect()
    }

    /// Planted weights and `n` multinomial samples.
    pub fn dataset(&self, growing: bool, n: u64, seed: u64) -> Result<(ErrorWeights, BitstringHistogram)> {
        let w = weights_from_rates(&self.model, &self.rates(growing, derive_seed(seed, 0)))?;
        let p = mixture_distribution(&self.pi, &w)?;
        Ok((w, sample_bitstrings_multinomial(&p, n, derive_seed(seed, 1))?))
    }

    /// Layer means of `Γ̂ = ĉ/(ĉ_1 + ĉ)` from a multinomial MLE fit.
    pub fn layer_rates(&self, y: &BitstringHistogram, config: &EstimatorConfig) -> Result<Vec<f64>> {
        let est = mle_multinomial(&self.pi, y, config)?;
        Ok(layer_means(&est, self.layers))
    }

    /// Rates of one freshly simulated and re-estimated null dataset.
    pub fn null_layer_rates(&self, n: u64, seed: u64, config: &EstimatorConfig) -> Result<Vec<f64>> {
        let (_, y) = self.dataset(false, n, seed)?;
        self.layer_rates(&y, config)
    }
}

/// Mean single-event rate per layer over all layer-resolved labels.
pub fn layer_means(est: &Estimate, depth: usize) -> Vec<f64> {
    let c1 = est.values.value_of(&ErrorLabel::ideal()).unwrap_or(1.0);
    let mut sum = vec![0.0; depth];
    let mut cnt = vec![0usize; depth];
    for (label, &c) in est.labels().iter().zip(est.values()) {
        if let Some(l) = label.layer.filter(|&l| l < depth) {
            sum[l] += if c1 + c > 0.0 { c / (c1 + c) } else { 0.0 };
            cnt[l] += 1;
        }
    }
    sum.iter().zip(&cnt).map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect()
}

/// Time-independent Pauli errors plus XX errors on every pair of qubits.
#[derive(Debug, Clone)]
pub struct CorrelatedPairs {
    pub spec: CircuitSpec,
    pub model: ErrorModelSpec,
    pub pi: DistributionMatrix,
}

impl CorrelatedPairs {
    /// Rows are tied across layers: one per (qubit, Pauli), one per XX pair, plus white noise.
    pub fn new(rows: usize, cols: usize, depth: usize, gate_seed: u64) -> Result<Self> {
        let spec = CircuitSpec::grid(rows, cols, depth, gate_seed);
        let n = spec.n_qubits;
        let layers: Vec<usize> = (0..depth).collect();
        let mut sources = Vec::new();
        for q in 0..n {
            for kind in [ErrorKind::PauliX, ErrorKind::PauliY, ErrorKind::PauliZ] {
                sources.push(ErrorSource::pauli_tied(kind, vec![q], layers.clone()));
            }
        }
        for u in 0..n {
            for v in u + 1..n {
                sources.push(ErrorSource::pauli_tied(ErrorKind::PauliX, vec![u, v], layers.clone()));
            }
        }
        sources.push(ErrorSource::white_noise());
        let model = ErrorModelSpec { sources };
        let pi = build_pi_matrix_with(&spec, &model, &BuildOptions { allow_large: true })?;
        Ok(CorrelatedPairs { spec, model, pi })
    }

    /// Single rates `U[lo, hi]` per layer; only `planted` carries a pair rate.
    pub fn rates(&self, lo: f64, hi: f64, planted: (usize, usize), pair_rate: f64, seed: u64) -> Vec<f64> {
        let mut r = rng(seed);
        let pair = [planted.0.min(planted.1), planted.0.max(planted.1)];
        self.model
            .sources
            .iter()
            .map(|s| match s.label.qubits.len() {
                1 => r.random_range(lo..=hi),
                2 if s.label.qubits == pair => pair_rate,
                _ => 0.0,
            })
            .collect()
    }

    /// Per-layer rate estimates fed to [`correlated_error_matrix`].
    pub fn excess_matrix(&self, est: &Estimate) -> Result<DMatrix<f64>> {
        let c1 = est.values.value_of(&ErrorLabel::ideal()).unwrap_or(1.0);
        let depth = self.spec.depth as f64;
        let (mut values, mut labels) = (Vec::new(), Vec::new());
        for (label, &c) in est.labels().iter().zip(est.values()) {
            if matches!(label.kind, ErrorKind::PauliX | ErrorKind::PauliY | ErrorKind::PauliZ) {
                let per = c / depth;
                values.push(if c1 + per > 0.0 { per / (c1 + per) } else { 0.0 });
                labels.push(label.clone());
            }
        }
        correlated_error_matrix(&ErrorWeights::unconstrained(values, labels)?, self.spec.n_qubits)
    }
}

/// Per-class rates for the full error catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRates {
    pub state_prep: f64,
    pub dephase_1q: f64,
    pub dephase_2q: f64,
    pub flip_flop: f64,
    pub readout_10: f64,
    pub readout_01: f64,
    pub double_readout: f64,
}

impl Default for TableRates {
    fn default() -> Self {
        TableRates {
            state_prep: 2e-3,
            dephase_1q: 2e-3,
            dephase_2q: 4e-3,
            flip_flop: 4e-3,
            readout_10: 2e-2,
            readout_01: 1e-2,
            double_readout: 1e-3,
        }
    }
}

/// Rates aligned with `model.sources`, each jittered by `U[0.5, 1.5]`.
pub fn table_rates(model: &ErrorModelSpec, base: &TableRates, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    model
        .sources
        .iter()
        .map(|s| {
            let g = match s.label.kind {
                ErrorKind::StatePrep => base.state_prep,
                ErrorKind::Dephase1q => base.dephase_1q,
                ErrorKind::Dephase2q => base.dephase_2q,
                ErrorKind::FlipFlop2q => base.flip_flop,
                ErrorKind::Readout10 => base.readout_10,
                ErrorKind::Readout01 => base.readout_01,
                ErrorKind::DoubleReadout1010 => base.double_readout,
                _ => 0.0,
            };
            g * r.random_range(0.5..=1.5)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_to_weights() {
        let spec = CircuitSpec::chain(2, 2, 0);
        let model = pauli_model(&spec, [0], true);
        let rates = vec![0.01, 0.0, 0.0, 0.0, 0.0, 0.02, 0.0];
        let w = weights_from_rates(&model, &rates).unwrap();
        let f = 0.99 * 0.98;
        assert!((w.values[0] - f).abs() < 1e-15);
        assert!((w.values[1] - f * 0.01 / 0.99).abs() < 1e-15);
        assert!((w.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w.values[7] - 0.01 * 0.02).abs() < 1e-12);
        assert!(weights_from_rates(&pauli_model(&spec, [0], false), &rates[..6]).is_err());
    }

    #[test]
    fn growing_rates_follow_the_ramp() {
        let td = TimeDependence::new(3, 4, 1, 1e-3, 4e-3, 2e-3).unwrap();
        assert_eq!(td.pi.k(), 1 + 3 * 3 * 4 + 1);
        let r = td.rates(true, 5);
        for (s, &g) in td.model.sources.iter().zip(&r) {
            if let Some(l) = s.label.layer {
                let e = 1e-3 + 1e-3 * l as f64;
                assert!(g >= 0.25 * e && g <= 0.75 * e);
            }
        }
    }
}
