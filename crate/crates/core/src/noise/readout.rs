use crate::error::{domain, Error};
use crate::sim::MeasurementCounts;
use crate::Result;
use nalgebra::DMatrix;

/// Readout confusion for a measured register.
///
/// Matrices are row-stochastic with rows indexed by the prepared state and
/// columns by the reported outcome; local index bit `j` is register qubit `j`.
#[derive(Debug, Clone, PartialEq)]
pub enum ReadoutConfusion {
    /// `(F_g, F_e)` per register qubit.
    PerQubit(Vec<[f64; 2]>),
    /// Full `2^k x 2^k` matrix.
    Joint(DMatrix<f64>),
}

impl ReadoutConfusion {
    pub fn ideal(num_qubits: usize) -> Self {
        Self::PerQubit(vec![[1.0, 1.0]; num_qubits])
    }

    pub fn per_qubit(fidelities: Vec<[f64; 2]>) -> Result<Self> {
        for f in fidelities.iter().flatten() {
            if !(0.0..=1.0).contains(f) {
                return Err(domain!("readout fidelity {f} outside [0, 1]"));
            }
        }
        Ok(Self::PerQubit(fidelities))
    }

    pub fn joint(m: DMatrix<f64>) -> Result<Self> {
        let d = m.nrows();
        if d != m.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(domain!("joint readout matrix must be 2^k square, got {}x{}", m.nrows(), m.ncols()));
        }
        for (i, row) in m.row_iter().enumerate() {
            if row.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(domain!("row {i} of the joint readout matrix has entries outside [0, 1]"));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(domain!("row {i} of the joint readout matrix sums to {s}"));
            }
        }
        Ok(Self::Joint(m))
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Self::PerQubit(f) => f.len(),
            Self::Joint(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    /// The 2x2 matrix of one qubit `[[F_g, 1 - F_g], [1 - F_e, F_e]]`.
    pub fn qubit_matrix([fg, fe]: [f64; 2]) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[fg, 1.0 - fg, 1.0 - fe, fe])
    }

    /// Full row-stochastic matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            Self::Joint(m) => m.clone(),
            Self::PerQubit(f) => {
                // kron(last, ..., first) keeps qubit 0 on the least-significant bit
                f.iter().fold(DMatrix::from_element(1, 1, 1.0), |acc, &fq| Self::qubit_matrix(fq).kronecker(&acc))
            }
        }
    }

    /// Per-qubit confusion restricted to `qubits` (joint matrices cannot be split).
    pub fn select(&self, qubits: &[usize]) -> Result<Self> {
        match self {
            Self::PerQubit(f) => qubits
                .iter()
                .map(|&q| f.get(q).copied().ok_or_else(|| domain!("no readout calibration for qubit {q}")))
                .collect::<Result<Vec<_>>>()
                .map(Self::PerQubit),
            Self::Joint(_) => Err(domain!("cannot select qubits from a joint readout matrix")),
        }
    }
}

/// Reported-outcome distribution: `out[m] = sum_t M[t][m] probs[t]`.
pub fn apply_confusion(probs: &[f64], confusion: &ReadoutConfusion) -> Result<Vec<f64>> {
    let m = confusion.matrix();
    if probs.len() != m.nrows() {
        return Err(domain!("{} probabilities for a {}-outcome confusion matrix", probs.len(), m.nrows()));
    }
    let p = nalgebra::DVector::from_column_slice(probs);
    Ok((m.transpose() * p).iter().copied().collect())
}

/// Inverts the confusion on the empirical frequencies of `counts`, then
/// clips negative entries and renormalises onto the probability simplex.
pub fn mitigate(counts: &MeasurementCounts, confusion: &ReadoutConfusion) -> Result<Vec<f64>> {
    mitigate_distribution(&counts.frequencies()?, confusion)
}

pub fn mitigate_distribution(freqs: &[f64], confusion: &ReadoutConfusion) -> Result<Vec<f64>> {
    let m = confusion.matrix();
    if freqs.len() != m.nrows() {
        return Err(domain!("{} frequencies for a {}-outcome confusion matrix", freqs.len(), m.nrows()));
    }
    let lu = m.transpose().lu();
    let det = lu.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::Numeric(format!("readout matrix is singular (det {det:.3e})")));
    }
    let x = lu
        .solve(&nalgebra::DVector::from_column_slice(freqs))
        .ok_or_else(|| Error::Numeric("readout matrix is singular".into()))?;
    let clipped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric("mitigated distribution has no positive mass".into()));
    }
    Ok(clipped.into_iter().map(|v| v / total).collect())
}

/// Total-variation distance between two distributions.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}
