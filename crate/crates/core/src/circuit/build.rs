use super::gates::{circuit_layers, Layer};
use super::noise::{ErrorModelSpec, ErrorSource, Operator, Placement};
use super::statevector::Statevector;
use super::{CircuitSpec, MAX_PI_QUBITS};
use crate::error::{invalid, Error, Result};
use crate::labels::{ErrorKind, ErrorLabel};
use crate::mixture::{DistributionMatrix, ErrorWeights, RowKind};
use num_complex::Complex64;
use rayon::prelude::*;

type C = Complex64;

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Permit dense builds above [`MAX_PI_QUBITS`].
    pub allow_large: bool,
}

fn run_layers(state: &mut Statevector, layers: &[Layer]) {
    for layer in layers {
        for g in &layer.gates {
            state.apply2(&g.matrix, g.a, g.b);
        }
    }
}

/// Ideal output state and its outcome distribution.
pub fn simulate_ideal(spec: &CircuitSpec) -> Result<(Statevector, Vec<f64>)> {
    spec.validate()?;
    let layers = circuit_layers(spec);
    let mut s = Statevector::zero(spec.n_qubits);
    run_layers(&mut s, &layers);
    let p = s.probabilities();
    Ok((s, p))
}

/// Output distribution with `op` inserted after the first `point` layers
/// (`point = 0` acts on the initial state, `point = depth` just before
/// measurement).
pub fn simulate_trajectory(spec: &CircuitSpec, point: usize, op: &Operator) -> Result<Vec<f64>> {
    spec.validate()?;
    if point > spec.depth {
        return Err(invalid(format!("insertion point {point} beyond depth {}", spec.depth)));
    }
    check_operator(spec, op)?;
    if !op.is_unitary() {
        return Err(invalid("non-unitary operator; readout errors use the classical perturbation path"));
    }
    let layers = circuit_layers(spec);
    let mut s = Statevector::zero(spec.n_qubits);
    run_layers(&mut s, &layers[..point]);
    s.apply(&op.matrix, &op.qubits);
    run_layers(&mut s, &layers[point..]);
    Ok(s.probabilities())
}

fn check_operator(spec: &CircuitSpec, op: &Operator) -> Result<()> {
    if op.matrix.len() != op.dim() * op.dim() {
        return Err(invalid("malformed operator"));
    }
    if op.qubits.iter().any(|&q| q >= spec.n_qubits) {
        return Err(invalid("operator qubit outside the register"));
    }
    Ok(())
}

/// Signed zero-sum row describing a readout error applied to `base`.
pub fn readout_perturbation_row(base: &[f64], kind: &ErrorKind, qubits: &[usize]) -> Result<Vec<f64>> {
    let d = base.len();
    if !d.is_power_of_two() || d < 2 {
        return Err(invalid("base row length must be a power of two"));
    }
    let n = d.trailing_zeros() as usize;
    if qubits.iter().any(|&q| q >= n) {
        return Err(invalid("readout qubit outside the register"));
    }
    let mut out = vec![0.0; d];
    match kind {
        ErrorKind::Readout10 | ErrorKind::Readout01 => {
            let [q] = qubits else { return Err(invalid("single readout needs exactly one qubit")) };
            let bit = 1usize << q;
            // mass leaves the `from` value of bit q and lands on the other
            let from_one = *kind == ErrorKind::Readout10;
            for (z, o) in out.iter_mut().enumerate() {
                let is_one = z & bit != 0;
                if is_one == from_one {
                    *o = -base[z];
                } else {
                    *o = base[z ^ bit];
                }
            }
        }
        ErrorKind::DoubleReadout1010 => {
            let [a, b] = qubits else { return Err(invalid("double readout needs exactly two qubits")) };
            if a == b {
                return Err(invalid("double readout needs two distinct qubits"));
            }
            let both = (1usize << a) | (1usize << b);
            for (z, o) in out.iter_mut().enumerate() {
                let mass = base[z | both];
                let ones = (z & (1 << a) != 0) as u8 + (z & (1 << b) != 0) as u8;
                *o = if ones == 1 { -mass } else { mass };
            }
        }
        other => return Err(invalid(format!("{other:?} is not a readout error"))),
    }
    Ok(out)
}

pub fn build_pi_matrix(spec: &CircuitSpec, model: &ErrorModelSpec) -> Result<DistributionMatrix> {
    build_pi_matrix_with(spec, model, &BuildOptions::default())
}

struct Prefixes {
    layers: Vec<Layer>,
    /// `states[t]` is the ideal state after `t` layers.
    states: Vec<Statevector>,
}

impl Prefixes {
    fn new(spec: &CircuitSpec) -> Self {
        let layers = circuit_layers(spec);
        let mut states = Vec::with_capacity(spec.depth + 1);
        let mut s = Statevector::zero(spec.n_qubits);
        states.push(s.clone());
        for l in 0..spec.depth {
            run_layers(&mut s, &layers[l..l + 1]);
            states.push(s.clone());
        }
        Prefixes { layers, states }
    }

    fn trajectory(&self, point: usize, op: &Operator) -> Vec<f64> {
        let mut s = self.states[point].clone();
        s.apply(&op.matrix, &op.qubits);
        run_layers(&mut s, &self.layers[point..]);
        s.probabilities()
    }
}

fn insertion_points(src: &ErrorSource) -> Vec<usize> {
    match &src.placement {
        Placement::Gate { layers } => layers.iter().map(|l| l + 1).collect(),
        _ => vec![0],
    }
}

/// Row 0 is the ideal distribution, followed by one row per source.
pub fn build_pi_matrix_with(spec: &CircuitSpec, model: &ErrorModelSpec, opts: &BuildOptions) -> Result<DistributionMatrix> {
    spec.validate()?;
    if spec.n_qubits > MAX_PI_QUBITS && !opts.allow_large {
        return Err(Error::Resource(format!(
            "dense build at {} qubits exceeds the default cap of {MAX_PI_QUBITS}",
            spec.n_qubits
        )));
    }
    model.validate(spec)?;
    let d = spec.dim();
    let pre = Prefixes::new(spec);
    let ideal = pre.states[spec.depth].probabilities();
    let rows: Vec<Vec<f64>> = model
        .sources
        .par_iter()
        .map(|src| match &src.placement {
            Placement::Gate { .. } | Placement::Prep => {
                let op = &src.kraus_terms[0].operator;
                let points = insertion_points(src);
                let mut acc = vec![0.0; d];
                for &t in &points {
                    for (a, v) in acc.iter_mut().zip(pre.trajectory(t, op)) {
                        *a += v;
                    }
                }
                let w = 1.0 / points.len() as f64;
                acc.iter_mut().for_each(|a| *a *= w);
                Ok(acc)
            }
            Placement::Readout => readout_perturbation_row(&ideal, &src.label.kind, &src.label.qubits),
            Placement::Uniform => Ok(vec![1.0 / d as f64; d]),
        })
        .collect::<Result<_>>()?;
    let mut data = Vec::with_capacity((rows.len() + 1) * d);
    data.extend_from_slice(&ideal);
    rows.iter().for_each(|r| data.extend_from_slice(r));
    let mut labels = vec![ErrorLabel::ideal()];
    labels.extend(model.labels());
    let mut kinds = vec![RowKind::Probability];
    kinds.extend(model.sources.iter().map(|s| match s.placement {
        Placement::Readout => RowKind::SignedPerturbation,
        _ => RowKind::Probability,
    }));
    DistributionMatrix::new(d, data, labels, kinds)
}

/// Reduced density matrix of `psi` on `qubits` (local bit t is `qubits[t]`).
fn reduced_density(psi: &Statevector, qubits: &[usize]) -> Vec<C> {
    let m = qubits.len();
    let dim = 1usize << m;
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    let offsets: Vec<usize> =
        (0..dim).map(|l| (0..m).filter(|&t| l >> t & 1 == 1).map(|t| 1usize << qubits[t]).sum()).collect();
    let mut rho = vec![C::new(0.0, 0.0); dim * dim];
    for base in 0..psi.amps.len() {
        if base & mask != 0 {
            continue;
        }
        for r in 0..dim {
            let ar = psi.amps[base + offsets[r]];
            for c in 0..dim {
                rho[r * dim + c] += ar * psi.amps[base + offsets[c]].conj();
            }
        }
    }
    rho
}

fn expect(rho: &[C], op: &[C]) -> C {
    let dim = (rho.len() as f64).sqrt() as usize;
    let mut acc = C::new(0.0, 0.0);
    for r in 0..dim {
        for c in 0..dim {
            acc += op[r * dim + c] * rho[c * dim + r];
        }
    }
    acc
}

fn m2(a: [f64; 4]) -> Vec<C> {
    a.iter().map(|&v| C::new(v, 0.0)).collect()
}

/// Terms `(A, B, w)` of the linearised amplitude-damping generator
/// `R(ρ) = Σ w A ρ B` for a single-qubit readout error.
fn readout_generator(from_one: bool) -> Vec<(Vec<C>, Vec<C>, f64)> {
    let (p_from, p_to) = if from_one { ([0., 0., 0., 1.], [1., 0., 0., 0.]) } else { ([1., 0., 0., 0.], [0., 0., 0., 1.]) };
    // |to⟩⟨from| and its adjoint
    let (jump, jump_dag) = if from_one { ([0., 1., 0., 0.], [0., 0., 1., 0.]) } else { ([0., 0., 1., 0.], [0., 1., 0., 0.]) };
    vec![
        (m2(p_from), m2(p_from), -1.0),
        (m2(p_to), m2(p_from), -0.5),
        (m2(p_from), m2(p_to), -0.5),
        (m2(jump), m2(jump_dag), 1.0),
    ]
}

fn kron2(a: &[C], b: &[C]) -> Vec<C> {
    // local bit 0 belongs to `a`
    let mut out = vec![C::new(0.0, 0.0); 16];
    for r in 0..4 {
        for c in 0..4 {
            out[4 * r + c] = a[2 * (r & 1) + (c & 1)] * b[2 * (r >> 1) + (c >> 1)];
        }
    }
    out
}

fn source_overlap(src: &ErrorSource, pre: &Prefixes, final_state: &Statevector, d: usize) -> f64 {
    match &src.placement {
        Placement::Gate { .. } | Placement::Prep => {
            let op = &src.kraus_terms[0].operator;
            let pts = insertion_points(src);
            pts.iter()
                .map(|&t| expect(&reduced_density(&pre.states[t], &op.qubits), &op.matrix).norm_sqr())
                .sum::<f64>()
                / pts.len() as f64
        }
        Placement::Uniform => 1.0 / d as f64,
        Placement::Readout => match src.label.kind {
            ErrorKind::Readout10 | ErrorKind::Readout01 => {
                let rho = reduced_density(final_state, &src.label.qubits);
                readout_generator(src.label.kind == ErrorKind::Readout10)
                    .iter()
                    .map(|(a, b, w)| w * (expect(&rho, a) * expect(&rho, b)).re)
                    .sum()
            }
            _ => {
                let rho = reduced_density(final_state, &src.label.qubits);
                let g = readout_generator(true);
                let mut acc = 0.0;
                for (ai, bi, wi) in &g {
                    for (aj, bj, wj) in &g {
                        let a = kron2(ai, aj);
                        let b = kron2(bi, bj);
                        acc += wi * wj * (expect(&rho, &a) * expect(&rho, &b)).re;
                    }
                }
                acc
            }
        },
    }
}

/// `⟨ψ|R_i(|ψ⟩⟨ψ|)|ψ⟩` for each source, i.e. its exact contribution per unit
/// weight to the many-body fidelity of this circuit.
pub fn overlap_coefficients(spec: &CircuitSpec, model: &ErrorModelSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    model.validate(spec)?;
    let pre = Prefixes::new(spec);
    let fin = pre.states[spec.depth].clone();
    let d = spec.dim();
    Ok(model.sources.par_iter().map(|s| source_overlap(s, &pre, &fin, d)).collect())
}

/// Many-body fidelity `⟨ψ|ρ|ψ⟩` of the state `ρ = c_1 |ψ⟩⟨ψ| + Σ c_i R_i(|ψ⟩⟨ψ|)`;
/// `c` is ordered as the rows of [`build_pi_matrix`].
pub fn state_overlap(spec: &CircuitSpec, model: &ErrorModelSpec, c: &ErrorWeights) -> Result<f64> {
    if c.len() != model.sources.len() + 1 {
        return Err(invalid("weights must cover the ideal row and every source"));
    }
    let ov = overlap_coefficients(spec, model)?;
    Ok(c.values[0] + c.values[1..].iter().zip(&ov).map(|(a, b)| a * b).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::noise::{pauli_model, table_model, TableOptions};
    use crate::circuit::{gates::circuit_layers, GateKind};

    #[test]
    fn depth_zero_is_identity() {
        let spec = CircuitSpec::chain(3, 0, 1);
        let (_, p) = simulate_ideal(&spec).unwrap();
        assert_eq!(p[0], 1.0);
        let x = Operator::pauli(&ErrorKind::PauliX, 2);
        let p = simulate_trajectory(&spec, 0, &x).unwrap();
        assert_eq!(p[4], 1.0);
        let z = Operator::pauli(&ErrorKind::PauliZ, 0);
        assert_eq!(simulate_trajectory(&spec, 0, &z).unwrap()[0], 1.0);
        let single = CircuitSpec::chain(1, 0, 1);
        let p = simulate_trajectory(&single, 0, &Operator::pauli(&ErrorKind::PauliX, 0)).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
    }

    fn dense_apply(u: &[C], v: &[C]) -> Vec<C> {
        let n = v.len();
        (0..n).map(|r| (0..n).map(|c| u[r * n + c] * v[c]).sum()).collect()
    }

    /// Full 4x4 matrices for a 2-qubit circuit, built independently.
    fn dense_layers(spec: &CircuitSpec) -> Vec<Vec<C>> {
        circuit_layers(spec)
            .into_iter()
            .map(|layer| {
                let mut u: Vec<C> = (0..16).map(|i| C::new(if i % 5 == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
                for g in layer.gates {
                    // reorder local basis when the gate is (1, 0)
                    let mut m = vec![C::new(0.0, 0.0); 16];
                    let perm = |l: usize| if g.a == 0 { l } else { ((l & 1) << 1) | (l >> 1) };
                    for r in 0..4 {
                        for c in 0..4 {
                            m[perm(r) * 4 + perm(c)] = g.matrix[r * 4 + c];
                        }
                    }
                    let mut nu = vec![C::new(0.0, 0.0); 16];
                    for r in 0..4 {
                        for c in 0..4 {
                            nu[r * 4 + c] = (0..4).map(|t| m[r * 4 + t] * u[t * 4 + c]).sum();
                        }
                    }
                    u = nu;
                }
                u
            })
            .collect()
    }

    #[test]
    fn two_qubit_circuit_matches_dense_oracle() {
        let spec = CircuitSpec::chain(2, 2, 17);
        let mats = dense_layers(&spec);
        let mut v = vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
        v = dense_apply(&mats[0], &v);
        let after_first = v.clone();
        v = dense_apply(&mats[1], &v);
        let (_, p) = simulate_ideal(&spec).unwrap();
        for j in 0..4 {
            assert!((p[j] - v[j].norm_sqr()).abs() < 1e-12);
        }
        // X on qubit 1 after layer 0, i.e. insertion point 1
        let x1: Vec<C> = [0., 0., 1., 0., 0., 0., 0., 1., 1., 0., 0., 0., 0., 1., 0., 0.]
            .iter()
            .map(|&a| C::new(a, 0.0))
            .collect();
        let w = dense_apply(&mats[1], &dense_apply(&x1, &after_first));
        let p = simulate_trajectory(&spec, 1, &Operator::pauli(&ErrorKind::PauliX, 1)).unwrap();
        for j in 0..4 {
            assert!((p[j] - w[j].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_haar_gate_matches_matrix_vector_product() {
        let spec = CircuitSpec::chain(2, 1, 99);
        let g = &circuit_layers(&spec)[0].gates[0];
        let (_, p) = simulate_ideal(&spec).unwrap();
        for j in 0..4 {
            assert!((p[j] - g.matrix[j * 4].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn readout_rows_match_hand_values() {
        let r = readout_perturbation_row(&[0.3, 0.7], &ErrorKind::Readout10, &[0]).unwrap();
        assert_eq!(r, vec![0.7, -0.7]);
        let r = readout_perturbation_row(&[0.3, 0.7], &ErrorKind::Readout01, &[0]).unwrap();
        assert_eq!(r, vec![-0.3, 0.3]);
        let r = readout_perturbation_row(&[0.5, 0.0, 0.5, 0.0], &ErrorKind::Readout10, &[0]).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
        let r = readout_perturbation_row(&[0.1, 0.2, 0.3, 0.4], &ErrorKind::DoubleReadout1010, &[0, 1]).unwrap();
        assert_eq!(r, vec![0.4, -0.4, -0.4, 0.4]);
        assert!(readout_perturbation_row(&[0.1, 0.2, 0.3, 0.4], &ErrorKind::DoubleReadout1010, &[1, 1]).is_err());
    }

    #[test]
    fn readout_rows_equal_weighted_kraus_action() {
        let spec = CircuitSpec::chain(3, 4, 5);
        let (psi, p) = simulate_ideal(&spec).unwrap();
        for src in [ErrorSource::readout_10(1), ErrorSource::readout_01(2), ErrorSource::double_readout(0, 2)] {
            let row = readout_perturbation_row(&p, &src.label.kind, &src.label.qubits).unwrap();
            let mut acc = vec![0.0; 8];
            for t in &src.kraus_terms {
                let mut s = psi.clone();
                s.apply(&t.operator.matrix, &t.operator.qubits);
                for (a, q) in acc.iter_mut().zip(s.probabilities()) {
                    *a += t.weight * q;
                }
            }
            for j in 0..8 {
                assert!((row[j] - acc[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pauli_model_row_count() {
        let spec = CircuitSpec::chain(2, 2, 3);
        let pi = build_pi_matrix(&spec, &pauli_model(&spec, [0usize, 1], false)).unwrap();
        assert_eq!(pi.k(), 1 + 3 * 2 * 2);
        let empty = build_pi_matrix(&spec, &ErrorModelSpec::default()).unwrap();
        assert_eq!(empty.k(), 1);
    }

    #[test]
    fn tied_row_is_average_of_layers() {
        let spec = CircuitSpec::chain(3, 3, 8);
        let tied = ErrorSource::pauli_tied(ErrorKind::PauliX, vec![1], vec![0, 2]);
        let pi = build_pi_matrix(&spec, &ErrorModelSpec { sources: vec![tied] }).unwrap();
        let x = Operator::pauli(&ErrorKind::PauliX, 1);
        let a = simulate_trajectory(&spec, 1, &x).unwrap();
        let b = simulate_trajectory(&spec, 3, &x).unwrap();
        for j in 0..8 {
            assert!((pi.get(1, j) - 0.5 * (a[j] + b[j])).abs() < 1e-14);
        }
    }

    #[test]
    fn overlaps_follow_table_coefficients_in_the_bulk() {
        let spec = CircuitSpec::chain(8, 12, 21);
        let model = table_model(&spec, &TableOptions::default());
        let ov = overlap_coefficients(&spec, &model).unwrap();
        let mean = |kind: ErrorKind| {
            let v: Vec<f64> = model.sources.iter().zip(&ov).filter(|(s, _)| s.label.kind == kind).map(|(_, &o)| o).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean(ErrorKind::StatePrep).abs() < 1e-12);
        assert!(mean(ErrorKind::Dephase1q) < 0.05);
        assert!((mean(ErrorKind::Dephase2q) - 0.25).abs() < 0.05);
        assert!((mean(ErrorKind::FlipFlop2q) - 0.25).abs() < 0.05);
        assert!((mean(ErrorKind::Readout10) + 0.5).abs() < 0.05);
        assert!((mean(ErrorKind::Readout01) + 0.5).abs() < 0.05);
        assert!((mean(ErrorKind::DoubleReadout1010) - 0.25).abs() < 0.05);
    }

    #[test]
    fn fsim_circuits_stay_normalised() {
        let spec = CircuitSpec { gate_kind: GateKind::FsimLike { theta: 1.57, phi: 0.52 }, ..CircuitSpec::chain(5, 6, 2) };
        let (s, _) = simulate_ideal(&spec).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn large_builds_need_override() {
        let spec = CircuitSpec::chain(15, 1, 0);
        assert!(matches!(build_pi_matrix(&spec, &ErrorModelSpec::default()), Err(Error::Resource(_))));
    }
}
