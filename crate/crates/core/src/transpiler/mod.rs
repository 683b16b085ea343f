//! Compilation of logical circuits onto a CZ-native coupling graph.
//!
//! The pipeline is `decompose -> route -> decompose (SWAPs) -> optimize`, and
//! every compile is closed by a unitary equivalence check against the
//! logical circuit under the final qubit permutation.

mod decompose;
pub mod equivalence;
mod optimize;
mod route;
mod topology;

pub use decompose::{decompose, decompose_circuit, is_native};
pub use equivalence::{assert_equivalent, permutation_matrix, Equivalence};
pub use optimize::optimize;
pub use route::{route, Routed};
pub use topology::{DeviceTopology, QubitMapping, GRID5_PRESET};

use crate::circuit::{Circuit, MAX_UNITARY_QUBITS};
use crate::Result;
use serde::Serialize;

/// Tolerance used for the closing equivalence check of every compile.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Gate statistics and the equivalence verdict for one compile.
#[derive(Debug, Clone, Serialize)]
pub struct CompileReport {
    pub label: String,
    pub logical_gates: usize,
    pub gates: usize,
    pub one_qubit_gates: usize,
    pub cz_gates: usize,
    pub depth: usize,
    /// Depth of the decomposed and routed circuit before optimisation.
    pub naive_depth: usize,
    pub swaps: usize,
    pub added_gates: isize,
    /// `None` when the register is too wide for a dense unitary check.
    pub equivalence: Option<Equivalence>,
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub circuit: Circuit,
    pub initial: QubitMapping,
    pub final_mapping: QubitMapping,
    pub report: CompileReport,
}

impl Compiled {
    /// Physical qubit holding logical qubit `q` at the end of the circuit.
    pub fn readout_qubit(&self, logical: usize) -> usize {
        self.final_mapping.physical(logical)
    }
}

/// Full compile of `c` onto `topo` starting from `initial`.
pub fn transpile(c: &Circuit, topo: &DeviceTopology, initial: &QubitMapping) -> Result<Compiled> {
    let decomposed = decompose_circuit(c)?;
    let routed = route(&decomposed, topo, initial)?;
    let native = decompose_circuit(&routed.circuit)?;
    let circuit = optimize(&native);

    let equivalence = if topo.num_qubits() <= MAX_UNITARY_QUBITS {
        let embedded = c.relabel(topo.num_qubits(), routed.initial.as_slice())?;
        let perm = routed.initial.transition_to(&routed.final_mapping);
        Some(assert_equivalent(&embedded, &circuit, &perm, EQUIVALENCE_TOL)?)
    } else {
        None
    };
    let report = CompileReport {
        label: c.label.clone(),
        logical_gates: c.len(),
        gates: circuit.len(),
        one_qubit_gates: circuit.count_where(|op| op.arity() == 1),
        cz_gates: circuit.two_qubit_count(),
        depth: circuit.depth(),
        naive_depth: native.depth(),
        swaps: routed.swaps,
        added_gates: circuit.len() as isize - c.len() as isize,
        equivalence,
    };
    Ok(Compiled { circuit, initial: routed.initial, final_mapping: routed.final_mapping, report })
}
