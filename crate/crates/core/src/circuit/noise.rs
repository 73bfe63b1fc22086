use super::CircuitSpec;
use crate::error::{invalid, Result};
use crate::labels::{ErrorKind, ErrorLabel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

type C = Complex64;

/// Layers at each end of the circuit where local errors do not behave like
/// bulk errors; gate sources there carry no fidelity coefficient.
pub const BOUNDARY_LAYERS: usize = 3;

/// A small operator on an ordered list of qubits, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    pub qubits: Vec<usize>,
    pub matrix: Vec<C>,
}

fn re(v: f64) -> C {
    C::new(v, 0.0)
}

impl Operator {
    pub fn new(qubits: Vec<usize>, matrix: Vec<C>) -> Result<Self> {
        let dim = 1usize << qubits.len();
        if matrix.len() != dim * dim {
            return Err(invalid(format!("operator on {} qubits needs {} entries", qubits.len(), dim * dim)));
        }
        let mut q = qubits.clone();
        q.sort_unstable();
        q.dedup();
        if q.len() != qubits.len() {
            return Err(invalid("operator acts on duplicate qubits"));
        }
        Ok(Operator { qubits, matrix })
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    pub fn pauli(kind: &ErrorKind, q: usize) -> Self {
        let z = re(0.0);
        let matrix = match kind {
            ErrorKind::PauliX => vec![z, re(1.0), re(1.0), z],
            ErrorKind::PauliY => vec![z, C::new(0.0, -1.0), C::new(0.0, 1.0), z],
            _ => vec![re(1.0), z, z, re(-1.0)],
        };
        Operator { qubits: vec![q], matrix }
    }

    /// Tensor product of single-qubit Paulis (`kind` on every listed qubit).
    pub fn pauli_string(kind: &ErrorKind, qubits: &[usize]) -> Self {
        let ops: Vec<Operator> = qubits.iter().map(|&q| Self::pauli(kind, q)).collect();
        let m = qubits.len();
        let dim = 1usize << m;
        let mut matrix = vec![re(0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                matrix[r * dim + c] = (0..m).map(|t| ops[t].matrix[2 * (r >> t & 1) + (c >> t & 1)]).product();
            }
        }
        Operator { qubits: qubits.to_vec(), matrix }
    }

    pub fn dephase_2q(a: usize, b: usize) -> Self {
        let mut m = vec![re(0.0); 16];
        for (i, v) in [1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
            m[5 * i] = re(v);
        }
        Operator { qubits: vec![a, b], matrix: m }
    }

    pub fn flip_flop(a: usize, b: usize) -> Self {
        let mut m = vec![re(0.0); 16];
        m[0] = re(1.0);
        m[4 + 2] = re(1.0);
        m[8 + 1] = re(1.0);
        m[15] = re(1.0);
        Operator { qubits: vec![a, b], matrix: m }
    }

    /// `|out⟩⟨inp|` on the listed qubits (local basis indices).
    pub fn ket_bra(qubits: Vec<usize>, out: usize, inp: usize) -> Self {
        let dim = 1usize << qubits.len();
        let mut m = vec![re(0.0); dim * dim];
        m[out * dim + inp] = re(1.0);
        Operator { qubits, matrix: m }
    }

    pub fn is_unitary(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v: C = (0..n).map(|t| self.matrix[t * n + i].conj() * self.matrix[t * n + j]).sum();
                (v - re(if i == j { 1.0 } else { 0.0 })).norm() < 1e-10
            })
        })
    }

    /// `tr(K)` normalised by the operator dimension.
    pub fn normalized_trace(&self) -> C {
        (0..self.dim()).map(|i| self.matrix[i * self.dim() + i]).sum::<C>() / self.dim() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausTerm {
    pub weight: f64,
    pub operator: Operator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Placement {
    /// After the gates of each listed layer; the row is the average over layers.
    Gate { layers: Vec<usize> },
    /// On the initial state, before layer 0.
    Prep,
    /// Classical perturbation of the ideal output distribution.
    Readout,
    /// The uniform `1/d` row.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSource {
    pub label: ErrorLabel,
    pub kraus_terms: Vec<KrausTerm>,
    pub fidelity_coeff: Option<f64>,
    pub placement: Placement,
}

impl ErrorSource {
    fn unitary(label: ErrorLabel, op: Operator, f: Option<f64>, placement: Placement) -> Self {
        ErrorSource { label, kraus_terms: vec![KrausTerm { weight: 1.0, operator: op }], fidelity_coeff: f, placement }
    }

    /// Pauli string of one kind on `qubits`, inserted after `layer`.
    pub fn pauli(kind: ErrorKind, qubits: Vec<usize>, layer: usize, f: Option<f64>) -> Self {
        let op = Operator::pauli_string(&kind, &qubits);
        Self::unitary(ErrorLabel::new(kind, qubits, Some(layer)), op, f, Placement::Gate { layers: vec![layer] })
    }

    /// Pauli string applied with equal weight after each of `layers`.
    pub fn pauli_tied(kind: ErrorKind, qubits: Vec<usize>, layers: Vec<usize>) -> Self {
        let op = Operator::pauli_string(&kind, &qubits);
        Self::unitary(ErrorLabel::new(kind, qubits, None), op, Some(0.0), Placement::Gate { layers })
    }

    pub fn state_prep(q: usize) -> Self {
        let op = Operator::pauli(&ErrorKind::PauliX, q);
        Self::unitary(ErrorLabel::new(ErrorKind::StatePrep, vec![q], None), op, Some(0.0), Placement::Prep)
    }

    pub fn dephase_1q(q: usize, layer: usize, f: Option<f64>) -> Self {
        let op = Operator::pauli(&ErrorKind::PauliZ, q);
        Self::unitary(
            ErrorLabel::new(ErrorKind::Dephase1q, vec![q], Some(layer)),
            op,
            f,
            Placement::Gate { layers: vec![layer] },
        )
    }

    pub fn dephase_2q(a: usize, b: usize, layer: usize, f: Option<f64>) -> Self {
        Self::unitary(
            ErrorLabel::new(ErrorKind::Dephase2q, vec![a, b], Some(layer)),
            Operator::dephase_2q(a, b),
            f,
            Placement::Gate { layers: vec![layer] },
        )
    }

    pub fn flip_flop(a: usize, b: usize, layer: usize, f: Option<f64>) -> Self {
        Self::unitary(
            ErrorLabel::new(ErrorKind::FlipFlop2q, vec![a, b], Some(layer)),
            Operator::flip_flop(a, b),
            f,
            Placement::Gate { layers: vec![layer] },
        )
    }

    pub fn readout_10(q: usize) -> Self {
        ErrorSource {
            label: ErrorLabel::new(ErrorKind::Readout10, vec![q], None),
            kraus_terms: vec![
                KrausTerm { weight: 1.0, operator: Operator::ket_bra(vec![q], 0, 1) },
                KrausTerm { weight: -1.0, operator: Operator::ket_bra(vec![q], 1, 1) },
            ],
            fidelity_coeff: Some(-0.5),
            placement: Placement::Readout,
        }
    }

    pub fn readout_01(q: usize) -> Self {
        ErrorSource {
            label: ErrorLabel::new(ErrorKind::Readout01, vec![q], None),
            kraus_terms: vec![
                KrausTerm { weight: 1.0, operator: Operator::ket_bra(vec![q], 1, 0) },
                KrausTerm { weight: -1.0, operator: Operator::ket_bra(vec![q], 0, 0) },
            ],
            fidelity_coeff: Some(-0.5),
            placement: Placement::Readout,
        }
    }

    pub fn double_readout(a: usize, b: usize) -> Self {
        let q = vec![a, b];
        ErrorSource {
            label: ErrorLabel::new(ErrorKind::DoubleReadout1010, q.clone(), None),
            kraus_terms: [(0, 1.0), (2, -1.0), (1, -1.0), (3, 1.0)]
                .into_iter()
                .map(|(out, w)| KrausTerm { weight: w, operator: Operator::ket_bra(q.clone(), out, 3) })
                .collect(),
            fidelity_coeff: Some(0.25),
            placement: Placement::Readout,
        }
    }

    pub fn white_noise() -> Self {
        ErrorSource {
            label: ErrorLabel::white_noise(),
            kraus_terms: vec![],
            fidelity_coeff: Some(0.0),
            placement: Placement::Uniform,
        }
    }
}

/// A catalog of error sources; the ideal row is implicit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorModelSpec {
    pub sources: Vec<ErrorSource>,
}

impl ErrorModelSpec {
    pub fn validate(&self, spec: &CircuitSpec) -> Result<()> {
        for s in &self.sources {
            if s.label.kind == ErrorKind::Ideal {
                return Err(invalid("the ideal row is implicit and cannot be listed as a source"));
            }
            if let Some(&q) = s.label.qubits.iter().find(|&&q| q >= spec.n_qubits) {
                return Err(invalid(format!("source {} references qubit {q} outside the register", s.label)));
            }
            for t in &s.kraus_terms {
                if t.operator.matrix.len() != t.operator.dim() * t.operator.dim() {
                    return Err(invalid(format!("source {} has a malformed operator", s.label)));
                }
                if let Some(&q) = t.operator.qubits.iter().find(|&&q| q >= spec.n_qubits) {
                    return Err(invalid(format!("source {} acts on qubit {q} outside the register", s.label)));
                }
            }
            match &s.placement {
                Placement::Gate { layers } => {
                    if layers.is_empty() {
                        return Err(invalid(format!("source {} has no layers", s.label)));
                    }
                    if let Some(&l) = layers.iter().find(|&&l| l >= spec.depth) {
                        return Err(invalid(format!("source {} at layer {l} but depth is {}", s.label, spec.depth)));
                    }
                    if s.kraus_terms.len() != 1 || s.kraus_terms[0].weight != 1.0 || !s.kraus_terms[0].operator.is_unitary() {
                        return Err(invalid(format!(
                            "source {} is not a single unitary term; use the readout placement",
                            s.label
                        )));
                    }
                }
                Placement::Prep => {
                    if s.kraus_terms.len() != 1 || !s.kraus_terms[0].operator.is_unitary() {
                        return Err(invalid(format!("prep source {} must be a single unitary", s.label)));
                    }
                }
                Placement::Readout => {
                    if !s.label.kind.is_readout() {
                        return Err(invalid(format!("source {} is not a readout kind", s.label)));
                    }
                }
                Placement::Uniform => {}
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<ErrorLabel> {
        self.sources.iter().map(|s| s.label.clone()).collect()
    }

    /// Fidelity coefficient of `label`; the ideal row has none (it enters directly).
    pub fn fidelity_coeff(&self, label: &ErrorLabel) -> Option<Option<f64>> {
        self.sources.iter().find(|s| &s.label == label).map(|s| s.fidelity_coeff)
    }
}

fn bulk(spec: &CircuitSpec, layer: usize) -> bool {
    layer >= BOUNDARY_LAYERS && layer + BOUNDARY_LAYERS < spec.depth
}

fn bulk_coeff(spec: &CircuitSpec, layer: usize, f: f64) -> Option<f64> {
    bulk(spec, layer).then_some(f)
}

/// Pauli X, Y and Z on every qubit after every layer in `layers`.
pub fn pauli_model(spec: &CircuitSpec, layers: impl IntoIterator<Item = usize>, white_noise: bool) -> ErrorModelSpec {
    let mut sources = Vec::new();
    for l in layers {
        for q in 0..spec.n_qubits {
            for kind in [ErrorKind::PauliX, ErrorKind::PauliY, ErrorKind::PauliZ] {
                sources.push(ErrorSource::pauli(kind, vec![q], l, bulk_coeff(spec, l, 0.0)));
            }
        }
    }
    if white_noise {
        sources.push(ErrorSource::white_noise());
    }
    ErrorModelSpec { sources }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableOptions {
    /// Drop gate errors in the first and last [`BOUNDARY_LAYERS`] layers.
    pub exclude_boundary: bool,
    pub double_readout: bool,
    pub white_noise: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { exclude_boundary: true, double_readout: true, white_noise: true }
    }
}

fn gate_layers(spec: &CircuitSpec, opts: &TableOptions) -> Vec<usize> {
    (0..spec.depth).filter(|&l| !opts.exclude_boundary || bulk(spec, l)).collect()
}

/// State prep, 1q and 2q dephasing, flip-flop, biased single readout, double
/// readout and white noise, in that order.
pub fn table_model(spec: &CircuitSpec, opts: &TableOptions) -> ErrorModelSpec {
    let n = spec.n_qubits;
    let layers = gate_layers(spec, opts);
    let mut s = Vec::new();
    s.extend((0..n).map(ErrorSource::state_prep));
    for &l in &layers {
        s.extend((0..n).map(|q| ErrorSource::dephase_1q(q, l, bulk_coeff(spec, l, 0.0))));
    }
    for &l in &layers {
        for (a, b) in spec.bonds(l) {
            s.push(ErrorSource::dephase_2q(a, b, l, bulk_coeff(spec, l, 0.25)));
        }
    }
    for &l in &layers {
        for (a, b) in spec.bonds(l) {
            s.push(ErrorSource::flip_flop(a, b, l, bulk_coeff(spec, l, 0.25)));
        }
    }
    s.extend((0..n).map(ErrorSource::readout_10));
    s.extend((0..n).map(ErrorSource::readout_01));
    if opts.double_readout {
        for a in 0..n {
            for b in a + 1..n {
                s.push(ErrorSource::double_readout(a, b));
            }
        }
    }
    if opts.white_noise {
        s.push(ErrorSource::white_noise());
    }
    ErrorModelSpec { sources: s }
}

/// Closed-form number of sources produced by [`table_model`].
pub fn catalog_source_count(spec: &CircuitSpec, opts: &TableOptions) -> usize {
    let n = spec.n_qubits;
    let layers = gate_layers(spec, opts);
    let bonds: usize = layers.iter().map(|&l| spec.bonds(l).len()).sum();
    n + n * layers.len() + 2 * bonds + 2 * n + if opts.double_readout { n * (n - 1) / 2 } else { 0 } + usize::from(opts.white_noise)
}
