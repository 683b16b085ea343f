//! Device calibration numbers for the five-qubit corner of the processor.
//!
//! Readout fidelities and RB figures feed the default noise model. The
//! coherence times are kept for reference only: relaxation and dephasing are
//! not simulated.

/// Physical qubits carrying readout calibration, in table order.
pub const READOUT_QUBITS: [usize; 4] = [0, 1, 2, 4];

/// `F_g`, probability that `|0>` is read as 0.
pub const F_G: [f64; 4] = [0.969, 0.955, 0.953, 0.946];
/// `F_e`, probability that `|1>` is read as 1.
pub const F_E: [f64; 4] = [0.940, 0.927, 0.923, 0.927];

/// Single-qubit RB fidelities per qubit.
pub const ONE_QUBIT_RB: [f64; 4] = [0.99949, 0.99950, 0.99902, 0.99893];
/// Headline single-qubit gate fidelity.
pub const ONE_QUBIT_FIDELITY: f64 = 0.999;

/// CZ couplers `q0-q1`, `q1-q2`, `q2-q4`, `q4-q1` and their RB fidelities.
pub const CZ_PAIRS: [(usize, usize); 4] = [(0, 1), (1, 2), (2, 4), (4, 1)];
pub const CZ_RB: [f64; 4] = [0.9953, 0.9911, 0.9877, 0.9926];
/// Representative CZ fidelity used for RB recovery checks.
pub const CZ_FIDELITY: f64 = 0.991;

pub const T1_US: [f64; 4] = [39.3, 40.8, 29.3, 24.5];
pub const T2_STAR_US: [f64; 4] = [4.23, 1.60, 1.68, 3.04];

/// Depolarizing probability whose average gate fidelity on `num_qubits` is `fidelity`:
/// `F = 1 - lambda (d - 1) / d`.
pub fn depolarizing_from_fidelity(fidelity: f64, num_qubits: u32) -> f64 {
    let d = f64::from(1u32 << num_qubits);
    (1.0 - fidelity) * d / (d - 1.0)
}

/// Inverse of [`depolarizing_from_fidelity`].
pub fn fidelity_from_depolarizing(lambda: f64, num_qubits: u32) -> f64 {
    let d = f64::from(1u32 << num_qubits);
    1.0 - lambda * (d - 1.0) / d
}

/// `(F_g, F_e)` per physical qubit `0..5`; `q3` is not read out and is ideal.
pub fn readout_fidelities() -> Vec<[f64; 2]> {
    let mut out = vec![[1.0, 1.0]; 5];
    for (k, &q) in READOUT_QUBITS.iter().enumerate() {
        out[q] = [F_G[k], F_E[k]];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_qubit_relation() {
        assert!((depolarizing_from_fidelity(0.999, 1) - 0.002).abs() < 1e-15);
        assert!((depolarizing_from_fidelity(0.991, 2) - 0.012).abs() < 1e-15);
        assert!((fidelity_from_depolarizing(0.012, 2) - 0.991).abs() < 1e-15);
    }
}
