use crate::error::{invalid, Error, Result};
use crate::labels::ErrorKind;
use crate::mixture::ErrorWeights;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Excess pair rates `c_{u,v} − c_u c_v` on an `n_qubits × n_qubits` grid.
///
/// Pair labels are those acting on two qubits; each is compared against the
/// single-qubit labels of the same kind. Layer-resolved entries are averaged
/// over layers first. The diagonal is zero.
pub fn correlated_error_matrix(w: &ErrorWeights, n_qubits: usize) -> Result<DMatrix<f64>> {
    let mut acc: BTreeMap<(ErrorKind, Vec<usize>), (f64, usize)> = BTreeMap::new();
    for (label, &v) in w.labels.iter().zip(&w.values) {
        if matches!(label.qubits.len(), 1 | 2) && label.kind != ErrorKind::Ideal {
            let e = acc.entry((label.kind.clone(), label.qubits.clone())).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    let mean = |key: &(ErrorKind, Vec<usize>)| acc.get(key).map(|&(s, c)| s / c as f64);
    let mut m = DMatrix::zeros(n_qubits, n_qubits);
    for (key, &(s, c)) in &acc {
        if key.1.len() != 2 {
            continue;
        }
        let (u, v) = (key.1[0], key.1[1]);
        if u >= n_qubits || v >= n_qubits || u == v {
            return Err(invalid(format!("pair ({u},{v}) does not fit {n_qubits} distinct qubits")));
        }
        let single = |q: usize| {
            mean(&(key.0.clone(), vec![q]))
                .ok_or_else(|| Error::IncompleteModel(format!("no single-qubit {} rate on qubit {q}", key.0.short_name())))
        };
        let x = s / c as f64 - single(u)? * single(v)?;
        m[(u, v)] = x;
        m[(v, u)] = x;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::ErrorLabel;

    fn w(entries: &[(Vec<usize>, f64)]) -> ErrorWeights {
        ErrorWeights::unconstrained(
            entries.iter().map(|e| e.1).collect(),
            entries.iter().map(|e| ErrorLabel::new(ErrorKind::PauliX, e.0.clone(), None)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn independent_errors_give_zero() {
        let m = correlated_error_matrix(&w(&[(vec![0], 0.1), (vec![1], 0.2), (vec![0, 1], 0.02)]), 2).unwrap();
        assert!(m.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn planted_pair_entry() {
        let m = correlated_error_matrix(&w(&[(vec![0], 0.0), (vec![2], 0.0), (vec![0, 2], 1e-3)]), 3).unwrap();
        assert_eq!(m[(0, 2)], 1e-3);
        assert_eq!(m[(2, 0)], 1e-3);
        assert_eq!(m[(1, 1)], 0.0);
    }

    #[test]
    fn missing_single_is_incomplete() {
        let r = correlated_error_matrix(&w(&[(vec![0], 0.1), (vec![0, 1], 0.02)]), 2);
        assert!(matches!(r, Err(Error::IncompleteModel(_))));
    }
}
