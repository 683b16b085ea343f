use crate::circuit::Circuit;
use crate::error::domain;
use crate::sim::{c, CMatrix};
use crate::Result;
use serde::Serialize;

/// Outcome of a unitary equivalence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equivalence {
    pub pass: bool,
    pub max_deviation: f64,
    /// Global phase `phi` with `U2 ~ e^{i phi} P U1`.
    pub phase: f64,
}

/// Unitary of the qubit permutation sending qubit `i` to position `perm[i]`.
pub fn permutation_matrix(perm: &[usize]) -> Result<CMatrix> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(domain!("{perm:?} is not a permutation"));
        }
    }
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let y: usize = (0..n).map(|i| ((x >> i) & 1) << perm[i]).sum();
        m[(y, x)] = c(1.0, 0.0);
    }
    Ok(m)
}

/// Max entrywise `|b - e^{i phi} a|` with `phi` chosen from `tr(a^dagger b)`.
pub fn phase_aligned_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    align(a, b).0
}

fn align(a: &CMatrix, b: &CMatrix) -> (f64, f64) {
    let overlap: crate::sim::C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    let rot = c(phase.cos(), phase.sin());
    let dev = a.iter().zip(b.iter()).map(|(x, y)| (y - rot * x).norm()).fold(0.0, f64::max);
    (dev, phase)
}

/// Checks `U(c2) = e^{i phi} P U(c1)` for the qubit permutation `perm`.
pub fn assert_equivalent(c1: &Circuit, c2: &Circuit, perm: &[usize], tol: f64) -> Result<Equivalence> {
    if c1.num_qubits() != c2.num_qubits() || perm.len() != c1.num_qubits() {
        return Err(domain!(
            "qubit counts differ: {} vs {} with a {}-entry permutation",
            c1.num_qubits(),
            c2.num_qubits(),
            perm.len()
        ));
    }
    let target = permutation_matrix(perm)? * c1.unitary()?;
    let (max_deviation, phase) = align(&target, &c2.unitary()?);
    Ok(Equivalence { pass: max_deviation <= tol, max_deviation, phase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, GateOp};

    fn sample() -> Circuit {
        Circuit::from_ops(3, "", vec![GateOp::h(0), GateOp::cnot(0, 1), GateOp::ry(2, 0.3), GateOp::ch(2, 1)]).unwrap()
    }

    #[test]
    fn self_equivalent() {
        let c = sample();
        let e = assert_equivalent(&c, &c, &[0, 1, 2], 1e-12).unwrap();
        assert!(e.pass);
        assert!(e.max_deviation < 1e-15);
    }

    #[test]
    fn extra_gate_fails() {
        let c = sample();
        let mut d = c.clone();
        d.push(GateOp::h(1)).unwrap();
        assert!(!assert_equivalent(&c, &d, &[0, 1, 2], 1e-9).unwrap().pass);
    }

    #[test]
    fn global_phase_is_ignored() {
        let c = sample();
        for k in 0..20 {
            let phi = -3.0 + 0.3 * k as f64;
            let mut d = c.clone();
            let ph = CMatrix::identity(2, 2) * crate::sim::c(phi.cos(), phi.sin());
            d.push(GateOp::new(Gate::Unitary(ph), vec![0]).unwrap()).unwrap();
            let e = assert_equivalent(&c, &d, &[0, 1, 2], 1e-10).unwrap();
            assert!(e.pass, "phi = {phi}");
        }
    }

    #[test]
    fn swap_is_a_permutation() {
        let empty = Circuit::new(2, "").unwrap();
        let swap = Circuit::from_ops(2, "", vec![GateOp::swap(0, 1)]).unwrap();
        assert!(assert_equivalent(&empty, &swap, &[1, 0], 1e-12).unwrap().pass);
        assert!(!assert_equivalent(&empty, &swap, &[0, 1], 1e-12).unwrap().pass);
    }
}
