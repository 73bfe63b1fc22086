//! Brickwork random circuits, error insertion and construction of labeled
//! `Π` matrices.

mod build;
mod gates;
mod noise;
mod statevector;

pub use build::{
    build_pi_matrix, build_pi_matrix_with, overlap_coefficients, readout_perturbation_row, simulate_ideal,
    simulate_trajectory, state_overlap, BuildOptions,
};
pub use gates::{haar_unitary, Layer, TwoQubitGate};
pub use noise::{
    catalog_source_count, pauli_model, table_model, ErrorModelSpec, ErrorSource, KrausTerm, Operator, Placement,
    TableOptions, BOUNDARY_LAYERS,
};
pub use statevector::Statevector;

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Largest register for which a dense `Π` is built without an override.
pub const MAX_PI_QUBITS: usize = 14;
/// Largest register the statevector simulator accepts.
pub const MAX_STATE_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    Chain1D,
    Grid2D { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    HaarSU4,
    /// Random single-qubit gates from {√X, √Y, √W} followed by fSim(θ, φ).
    FsimLike { theta: f64, phi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n_qubits: usize,
    pub depth: usize,
    pub geometry: Geometry,
    pub gate_seed: u64,
    #[serde(default = "default_gate_kind")]
    pub gate_kind: GateKind,
}

fn default_gate_kind() -> GateKind {
    GateKind::HaarSU4
}

impl CircuitSpec {
    pub fn chain(n_qubits: usize, depth: usize, gate_seed: u64) -> Self {
        CircuitSpec { n_qubits, depth, geometry: Geometry::Chain1D, gate_seed, gate_kind: GateKind::HaarSU4 }
    }

    pub fn grid(rows: usize, cols: usize, depth: usize, gate_seed: u64) -> Self {
        CircuitSpec {
            n_qubits: rows * cols,
            depth,
            geometry: Geometry::Grid2D { rows, cols },
            gate_seed,
            gate_kind: GateKind::HaarSU4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(invalid("circuit needs at least one qubit"));
        }
        if self.n_qubits > MAX_STATE_QUBITS {
            return Err(crate::Error::Resource(format!(
                "{} qubits exceeds the statevector limit of {MAX_STATE_QUBITS}",
                self.n_qubits
            )));
        }
        if let Geometry::Grid2D { rows, cols } = self.geometry {
            if rows * cols != self.n_qubits {
                return Err(invalid(format!("grid {rows}x{cols} does not hold {} qubits", self.n_qubits)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Qubit pairs acted on by two-qubit gates in `layer`.
    pub fn bonds(&self, layer: usize) -> Vec<(usize, usize)> {
        match self.geometry {
            Geometry::Chain1D => {
                let n = self.n_qubits;
                let even = (0..n.saturating_sub(1)).step_by(2).map(|a| (a, a + 1));
                let odd = (1..n.saturating_sub(1)).step_by(2).map(|a| (a, a + 1));
                even.chain(odd).collect()
            }
            Geometry::Grid2D { rows, cols } => {
                let q = |r: usize, c: usize| r * cols + c;
                let mut out = Vec::new();
                match layer % 4 {
                    0 | 1 => {
                        let start = layer % 4;
                        for r in 0..rows {
                            for c in (start..cols.saturating_sub(1)).step_by(2) {
                                out.push((q(r, c), q(r, c + 1)));
                            }
                        }
                    }
                    _ => {
                        let start = layer % 4 - 2;
                        for c in 0..cols {
                            for r in (start..rows.saturating_sub(1)).step_by(2) {
                                out.push((q(r, c), q(r + 1, c)));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Distinct nearest-neighbour pairs over all layers.
    pub fn all_bonds(&self) -> Vec<(usize, usize)> {
        let mut b: Vec<(usize, usize)> = (0..self.depth.max(4)).flat_map(|l| self.bonds(l)).collect();
        b.sort_unstable();
        b.dedup();
        b
    }
}
