use super::NoiseModel;
use crate::circuit::{Circuit, Gate};
use crate::error::Error;
use crate::sim::DensityMatrix;
use crate::transpiler::is_native;
use crate::Result;

/// Density-matrix evolution of a native circuit from `|0...0>` with a
/// depolarizing channel after every gate. Readout confusion is not applied.
pub fn noisy_execute(c: &Circuit, model: &NoiseModel) -> Result<DensityMatrix> {
    noisy_execute_from(DensityMatrix::zero(c.num_qubits())?, c, model)
}

/// Same as [`noisy_execute`] starting from `rho`.
pub fn noisy_execute_from(mut rho: DensityMatrix, c: &Circuit, model: &NoiseModel) -> Result<DensityMatrix> {
    if rho.num_qubits() != c.num_qubits() {
        return Err(crate::error::domain!(
            "{}-qubit state for a {}-qubit circuit",
            rho.num_qubits(),
            c.num_qubits()
        ));
    }
    for op in c.ops() {
        if !is_native(op) {
            return Err(Error::Compile(format!(
                "{} is not native to the CZ gate set; transpile the circuit first",
                op.gate.name()
            )));
        }
        rho.conjugate_in_place(&op.matrix(), &op.qubits);
        let lambda = if matches!(op.gate, Gate::Cz) { model.lambda_2q } else { model.lambda_1q };
        rho.depolarize_in_place(&op.qubits, lambda);
    }
    Ok(rho)
}
