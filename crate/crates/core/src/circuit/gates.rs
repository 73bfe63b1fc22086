use super::{CircuitSpec, GateKind};
use crate::rng::{rng, Rng};
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

type C = Complex64;

#[derive(Debug, Clone)]
pub struct TwoQubitGate {
    pub a: usize,
    pub b: usize,
    pub matrix: [C; 16],
}

#[derive(Debug, Clone, Default)]
pub struct Layer {
    pub gates: Vec<TwoQubitGate>,
}

/// Haar-random `n x n` unitary: Gram-Schmidt on a complex Gaussian matrix,
/// with column phases fixed so the triangular factor has a positive diagonal.
pub fn haar_unitary(n: usize, r: &mut Rng) -> Vec<C> {
    let mut cols: Vec<Vec<C>> = (0..n)
        .map(|_| (0..n).map(|_| C::new(r.sample(StandardNormal), r.sample(StandardNormal))).collect())
        .collect();
    for j in 0..n {
        for i in 0..j {
            let proj: C = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            let ci = cols[i].clone();
            for (x, y) in cols[j].iter_mut().zip(&ci) {
                *x -= proj * y;
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|x| *x /= norm);
    }
    let mut u = vec![C::new(0.0, 0.0); n * n];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            u[i * n + j] = v;
        }
    }
    u
}

fn kron(a: &[C; 4], b: &[C; 4]) -> [C; 16] {
    // local index bit 0 belongs to `a`
    let mut out = [C::new(0.0, 0.0); 16];
    for r in 0..4 {
        for c in 0..4 {
            out[4 * r + c] = a[2 * (r & 1) + (c & 1)] * b[2 * (r >> 1) + (c >> 1)];
        }
    }
    out
}

fn matmul4(x: &[C; 16], y: &[C; 16]) -> [C; 16] {
    let mut out = [C::new(0.0, 0.0); 16];
    for r in 0..4 {
        for c in 0..4 {
            out[4 * r + c] = (0..4).map(|t| x[4 * r + t] * y[4 * t + c]).sum();
        }
    }
    out
}

fn sqrt_gate(axis: usize) -> [C; 4] {
    // √P = (I - i P)/√2 up to phase, for P in {X, Y, W=(X+Y)/√2}
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (px, py) = match axis {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        _ => (h, h),
    };
    let off = C::new(px, -py);
    let i = C::new(0.0, -1.0);
    [C::new(h, 0.0), i * off.conj() * h, i * off * h, C::new(h, 0.0)]
}

fn fsim(theta: f64, phi: f64) -> [C; 16] {
    let z = C::new(0.0, 0.0);
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = [z; 16];
    m[0] = C::new(1.0, 0.0);
    m[5] = C::new(c, 0.0);
    m[6] = C::new(0.0, -s);
    m[9] = C::new(0.0, -s);
    m[10] = C::new(c, 0.0);
    m[15] = C::from_polar(1.0, -phi);
    m
}

/// The deterministic gate list of `spec`.
pub fn circuit_layers(spec: &CircuitSpec) -> Vec<Layer> {
    let mut r = rng(spec.gate_seed);
    (0..spec.depth)
        .map(|l| Layer {
            gates: spec
                .bonds(l)
                .into_iter()
                .map(|(a, b)| {
                    let matrix = match spec.gate_kind {
                        GateKind::HaarSU4 => haar_unitary(4, &mut r).try_into().unwrap(),
                        GateKind::FsimLike { theta, phi } => {
                            let ga = sqrt_gate(r.random_range(0..3));
                            let gb = sqrt_gate(r.random_range(0..3));
                            matmul4(&fsim(theta, phi), &kron(&ga, &gb))
                        }
                    };
                    TwoQubitGate { a, b, matrix }
                })
                .collect(),
        })
        .collect()
}
