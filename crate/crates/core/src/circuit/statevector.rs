use num_complex::Complex64;

/// Dense amplitudes; qubit 0 is the least significant bit of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub n_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl Statevector {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { n_qubits, amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Apply a `2^m x 2^m` row-major operator to `qubits` (local index bit t
    /// is `qubits[t]`).
    pub fn apply(&mut self, op: &[Complex64], qubits: &[usize]) {
        let m = qubits.len();
        let dim = 1usize << m;
        debug_assert_eq!(op.len(), dim * dim);
        let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        let offsets: Vec<usize> =
            (0..dim).map(|l| (0..m).filter(|&t| l >> t & 1 == 1).map(|t| 1usize << qubits[t]).sum()).collect();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, &off) in offsets.iter().enumerate() {
                local[l] = self.amps[base + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let row = &op[r * dim..(r + 1) * dim];
                self.amps[base + off] = row.iter().zip(&local).map(|(a, b)| a * b).sum();
            }
        }
    }

    /// Specialised two-qubit gate application.
    pub fn apply2(&mut self, op: &[Complex64; 16], a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        let mask = ma | mb;
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            let idx = [base, base | ma, base | mb, base | ma | mb];
            let v = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for r in 0..4 {
                self.amps[idx[r]] = op[4 * r] * v[0] + op[4 * r + 1] * v[1] + op[4 * r + 2] * v[2] + op[4 * r + 3] * v[3];
            }
        }
    }

    /// `⟨ψ|A|ψ⟩` for an operator on `qubits`.
    pub fn expectation(&self, op: &[Complex64], qubits: &[usize]) -> Complex64 {
        let mut t = self.clone();
        t.apply(op, qubits);
        self.inner(&t)
    }
}
