//! Dense few-qubit simulation: pure states, density matrices, channels and
//! measurement sampling.
//!
//! Qubit `0` is the least-significant bit of a basis index. When a matrix
//! acts on an ordered operand list, operand `0` is the most-significant bit
//! of the matrix's local index, so `CNOT` with operands `[control, target]`
//! is the textbook 4x4 permutation swapping `|10>` and `|11>`.

mod density;
pub mod gates;
pub(crate) mod kernel;
mod measure;
mod state;

pub use density::DensityMatrix;
pub use measure::{sample_counts, sample_distribution, Measure, MeasurementCounts};
pub use state::StateVector;

use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Largest register the dense backend accepts.
pub const MAX_QUBITS: usize = 8;

/// Tolerance used when validating user-supplied unitaries and Kraus sets.
pub const VALIDATION_TOL: f64 = 1e-10;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entrywise deviation of `m` from unitarity (`m^dagger m - I`).
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    max_deviation_from_identity(&prod)
}

pub(crate) fn max_deviation_from_identity(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - c(want, 0.0)).norm());
        }
    }
    worst
}

/// `a (x) b` with `a` on the most-significant operand positions.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub(crate) fn check_targets(targets: &[usize], num_qubits: usize) -> crate::Result<()> {
    for (k, &t) in targets.iter().enumerate() {
        if t >= num_qubits {
            return Err(crate::error::domain!("qubit {t} out of range for {num_qubits}-qubit register"));
        }
        if targets[..k].contains(&t) {
            return Err(crate::error::domain!("duplicate target qubit {t}"));
        }
    }
    Ok(())
}

pub(crate) use kernel::apply_matrix as kernel_apply;
