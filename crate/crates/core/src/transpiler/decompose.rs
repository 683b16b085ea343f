use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::Error;
use crate::Result;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// True for gates the hardware executes directly: any one-qubit gate and CZ.
pub fn is_native(op: &GateOp) -> bool {
    op.arity() == 1 || matches!(op.gate, Gate::Cz)
}

/// Rewrites one gate over `{1-qubit, CZ}`. The product of the result equals
/// the original unitary exactly (no global phase is introduced).
pub fn decompose(op: &GateOp) -> Result<Vec<GateOp>> {
    if is_native(op) {
        return Ok(vec![op.clone()]);
    }
    let q = &op.qubits;
    let out = match &op.gate {
        Gate::Cnot => cnot(q[0], q[1]),
        // Ry(pi/4) Z Ry(-pi/4) = H
        Gate::Ch => vec![GateOp::ry(q[1], -FRAC_PI_4), GateOp::cz(q[0], q[1]), GateOp::ry(q[1], FRAC_PI_4)],
        Gate::Cry(theta) => cry(q[0], q[1], *theta),
        Gate::Swap => [cnot(q[0], q[1]), cnot(q[1], q[0]), cnot(q[0], q[1])].concat(),
        // R_y(pi b + pi a / 2) = R_y(pi)^b R_y(pi/2)^a, and the two factors commute
        Gate::Ccu | Gate::Ccv => [cry(q[0], q[2], PI), cry(q[1], q[2], FRAC_PI_2)].concat(),
        other => {
            return Err(Error::Compile(format!(
                "no decomposition for {}-qubit {} gate",
                op.arity(),
                other.name()
            )))
        }
    };
    Ok(out)
}

fn cnot(control: usize, target: usize) -> Vec<GateOp> {
    vec![GateOp::h(target), GateOp::cz(control, target), GateOp::h(target)]
}

// Z R_y(phi) Z = R_y(-phi), so the target sees R_y(theta) only when the control is set.
fn cry(control: usize, target: usize, theta: f64) -> Vec<GateOp> {
    vec![
        GateOp::ry(target, theta / 2.0),
        GateOp::cz(control, target),
        GateOp::ry(target, -theta / 2.0),
        GateOp::cz(control, target),
    ]
}

/// Decomposes every gate of `c`.
pub fn decompose_circuit(c: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(c.num_qubits(), c.label.clone())?;
    for op in c.ops() {
        for native in decompose(op)? {
            out.push(native)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::CMatrix;
    use crate::transpiler::equivalence::phase_aligned_deviation;

    fn check(op: GateOp, n: usize) {
        let logical = Circuit::from_ops(n, "", vec![op.clone()]).unwrap();
        let compiled = decompose_circuit(&logical).unwrap();
        assert!(compiled.ops().iter().all(is_native));
        let dev = phase_aligned_deviation(&logical.unitary().unwrap(), &compiled.unitary().unwrap());
        assert!(dev < 1e-10, "{op}: deviation {dev}");
    }

    #[test]
    fn cnot_is_h_cz_h() {
        let ops = decompose(&GateOp::cnot(0, 1)).unwrap();
        assert_eq!(ops, vec![GateOp::h(1), GateOp::cz(0, 1), GateOp::h(1)]);
        check(GateOp::cnot(0, 1), 2);
        check(GateOp::cnot(1, 0), 2);
    }

    #[test]
    fn ch_cry_swap_equivalent() {
        check(GateOp::ch(0, 1), 2);
        check(GateOp::ch(1, 0), 2);
        for theta in [0.3, -1.2, FRAC_PI_2, PI, 1.5 * PI] {
            check(GateOp::cry(1, 0, theta), 2);
        }
        check(GateOp::swap(0, 1), 2);
        let swap = decompose(&GateOp::swap(0, 1)).unwrap();
        assert_eq!(swap.iter().filter(|o| o.gate == Gate::Cz).count(), 3);
        assert_eq!(swap.iter().filter(|o| o.gate == Gate::H).count(), 6);
    }

    #[test]
    fn ch_is_exact_without_phase() {
        let ops = decompose(&GateOp::ch(0, 1)).unwrap();
        let c = Circuit::from_ops(2, "", ops).unwrap();
        let direct = Circuit::from_ops(2, "", vec![GateOp::ch(0, 1)]).unwrap();
        let diff = c.unitary().unwrap() - direct.unitary().unwrap();
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn ccu_truth_table_after_decomposition() {
        for perm in [[0, 1, 2], [2, 1, 0], [1, 2, 0]] {
            check(GateOp::ccu(perm[0], perm[1], perm[2]), 3);
            check(GateOp::ccv(perm[0], perm[1], perm[2]), 3);
        }
        let ops = decompose(&GateOp::ccu(2, 1, 0)).unwrap();
        assert!(ops.iter().all(|o| o.arity() <= 2));
    }

    #[test]
    fn unsupported_gate() {
        let u = CMatrix::identity(4, 4);
        let op = GateOp::new(Gate::Unitary(u), vec![0, 1]).unwrap();
        assert!(matches!(decompose(&op), Err(Error::Compile(_))));
    }
}
