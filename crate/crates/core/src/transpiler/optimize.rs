use crate::circuit::{Circuit, Gate, GateOp};
use crate::sim::{c, CMatrix};

/// Peephole optimisation to a fixed point:
///
/// 1. adjacent identical self-inverse gates cancel,
/// 2. consecutive `R_y` on a qubit merge,
/// 3. `R_y(0)` and scalar one-qubit gates vanish,
/// 4. remaining runs of one-qubit gates fuse into a single unitary.
///
/// "Adjacent" means no gate in between touches any of the operands.
/// The result is equivalent up to global phase and never deeper.
pub fn optimize(circuit: &Circuit) -> Circuit {
    let mut ops: Vec<GateOp> = circuit.ops().to_vec();
    loop {
        let before = ops.clone();
        ops = cancel_inverse_pairs(ops);
        ops = merge_rotations(ops);
        ops = drop_identities(ops);
        ops = fuse_single_qubit_runs(ops);
        if ops == before {
            break;
        }
    }
    Circuit::from_ops(circuit.num_qubits(), circuit.label.clone(), ops).expect("operands unchanged")
}

fn next_on(ops: &[Option<GateOp>], from: usize, q: usize) -> Option<usize> {
    (from + 1..ops.len()).find(|&j| ops[j].as_ref().is_some_and(|op| op.qubits.contains(&q)))
}

fn same_operands(a: &GateOp, b: &GateOp) -> bool {
    if a.gate.is_symmetric() {
        let mut x = a.qubits.clone();
        let mut y = b.qubits.clone();
        x.sort_unstable();
        y.sort_unstable();
        x == y
    } else {
        a.qubits == b.qubits
    }
}

fn cancel_inverse_pairs(ops: Vec<GateOp>) -> Vec<GateOp> {
    let mut slots: Vec<Option<GateOp>> = ops.into_iter().map(Some).collect();
    for i in 0..slots.len() {
        let Some(op) = slots[i].clone() else { continue };
        if !op.gate.is_self_inverse() {
            continue;
        }
        let nexts: Vec<Option<usize>> = op.qubits.iter().map(|&q| next_on(&slots, i, q)).collect();
        let Some(j) = nexts[0] else { continue };
        if nexts.iter().any(|n| *n != Some(j)) {
            continue;
        }
        let other = slots[j].as_ref().expect("next_on only returns live slots");
        if other.gate == op.gate && same_operands(&op, other) {
            slots[i] = None;
            slots[j] = None;
        }
    }
    slots.into_iter().flatten().collect()
}

fn merge_rotations(ops: Vec<GateOp>) -> Vec<GateOp> {
    let mut slots: Vec<Option<GateOp>> = ops.into_iter().map(Some).collect();
    for i in 0..slots.len() {
        let Some(GateOp { gate: Gate::Ry(t1), qubits }) = slots[i].clone() else { continue };
        let q = qubits[0];
        let Some(j) = next_on(&slots, i, q) else { continue };
        if let Some(GateOp { gate: Gate::Ry(t2), .. }) = slots[j] {
            slots[j] = Some(GateOp::ry(q, t1 + t2));
            slots[i] = None;
        }
    }
    slots.into_iter().flatten().collect()
}

fn is_scalar(m: &CMatrix) -> bool {
    let d = m[(0, 0)];
    if (d.norm() - 1.0).abs() > 1e-12 {
        return false;
    }
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| {
        let want = if i == j { d } else { c(0.0, 0.0) };
        (m[(i, j)] - want).norm() <= 1e-12
    }))
}

fn drop_identities(ops: Vec<GateOp>) -> Vec<GateOp> {
    ops.into_iter()
        .filter(|op| match &op.gate {
            Gate::Ry(t) => (t / 2.0).sin().abs() > 1e-12,
            Gate::Unitary(m) if op.arity() == 1 => !is_scalar(m),
            _ => true,
        })
        .collect()
}

fn fuse_single_qubit_runs(ops: Vec<GateOp>) -> Vec<GateOp> {
    let mut slots: Vec<Option<GateOp>> = ops.into_iter().map(Some).collect();
    for i in 0..slots.len() {
        let Some(op) = slots[i].clone() else { continue };
        if op.arity() != 1 {
            continue;
        }
        let q = op.qubits[0];
        let mut run = vec![i];
        let mut cursor = i;
        while let Some(j) = next_on(&slots, cursor, q) {
            if slots[j].as_ref().is_some_and(|o| o.arity() == 1) {
                run.push(j);
                cursor = j;
            } else {
                break;
            }
        }
        if run.len() < 2 {
            continue;
        }
        let product = run.iter().fold(CMatrix::identity(2, 2), |acc, &k| {
            slots[k].as_ref().expect("run members are live").matrix() * acc
        });
        for &k in &run {
            slots[k] = None;
        }
        if !is_scalar(&product) {
            let last = *run.last().expect("run has at least two members");
            slots[last] = Some(GateOp::new(Gate::Unitary(product), vec![q]).expect("product of unitaries"));
        }
    }
    slots.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transpiler::assert_equivalent;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn circuit(n: usize, ops: Vec<GateOp>) -> Circuit {
        Circuit::from_ops(n, "", ops).unwrap()
    }

    #[test]
    fn hadamard_pair_cancels() {
        assert!(optimize(&circuit(1, vec![GateOp::h(0), GateOp::h(0)])).is_empty());
    }

    #[test]
    fn rotations_merge() {
        let out = optimize(&circuit(1, vec![GateOp::ry(0, FRAC_PI_4), GateOp::ry(0, FRAC_PI_4)]));
        assert_eq!(out.ops(), &[GateOp::ry(0, FRAC_PI_2)]);
    }

    #[test]
    fn cz_pair_cancels_through_commuting_neighbours() {
        let c = circuit(3, vec![GateOp::cz(0, 1), GateOp::h(2), GateOp::cz(1, 0)]);
        let out = optimize(&c);
        assert_eq!(out.ops(), &[GateOp::h(2)]);
    }

    #[test]
    fn blocked_pairs_survive() {
        let c = circuit(2, vec![GateOp::h(0), GateOp::cz(0, 1), GateOp::h(0)]);
        assert_eq!(optimize(&c).len(), 3);
    }

    #[test]
    fn fused_runs_keep_the_unitary() {
        let c = circuit(2, vec![GateOp::h(0), GateOp::ry(0, 0.3), GateOp::z(0), GateOp::cz(0, 1), GateOp::x(1), GateOp::h(1)]);
        let out = optimize(&c);
        assert_eq!(out.len(), 3);
        assert!(out.depth() <= c.depth());
        assert!(assert_equivalent(&c, &out, &[0, 1], 1e-12).unwrap().pass);
        assert_eq!(optimize(&out), out);
    }
}
