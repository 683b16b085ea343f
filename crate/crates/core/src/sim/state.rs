use super::kernel::{apply_matrix, gather_bits};
use super::{c, check_targets, unitarity_deviation, CMatrix, DensityMatrix, C64, MAX_QUBITS, VALIDATION_TOL};
use crate::error::{domain, Error};
use crate::Result;

/// Pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(domain!("qubit count {n} outside 1..={MAX_QUBITS}"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        Ok(Self { num_qubits: n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(domain!("amplitude count {len} is not 2^n with 1 <= n <= {MAX_QUBITS}"));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::Validation(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amps })
    }

    /// Basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n)?;
        if index >= s.amps.len() {
            return Err(domain!("basis index {index} out of range"));
        }
        s.amps[0] = c(0.0, 0.0);
        s.amps[index] = c(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a validated unitary to the ordered `targets`.
    pub fn apply_unitary(&self, matrix: &CMatrix, targets: &[usize]) -> Result<Self> {
        check_targets(targets, self.num_qubits)?;
        let local = 1usize << targets.len();
        if matrix.nrows() != local || matrix.ncols() != local {
            return Err(domain!(
                "{}x{} matrix does not act on {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                targets.len()
            ));
        }
        let dev = unitarity_deviation(matrix);
        if dev > VALIDATION_TOL {
            return Err(Error::Validation(format!("matrix is not unitary (deviation {dev:.3e})")));
        }
        let mut out = self.clone();
        apply_matrix(&mut out.amps, matrix, targets);
        Ok(out)
    }

    /// `self (x) other`; `self` keeps qubits `0..n_self`, `other` is shifted above it.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Resource(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for hi in &other.amps {
            for lo in &self.amps {
                amps.push(lo * hi);
            }
        }
        Ok(Self { num_qubits: n, amps })
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    pub(crate) fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        check_targets(qubits, self.num_qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[gather_bits(i, qubits)] += a.norm_sqr();
        }
        Ok(probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn close(a: C64, re: f64, im: f64) -> bool {
        (a - c(re, im)).norm() < 1e-12
    }

    #[test]
    fn zero_state_shapes() {
        let one = StateVector::zero(1).unwrap();
        assert!(close(one.amplitudes()[0], 1.0, 0.0) && close(one.amplitudes()[1], 0.0, 0.0));
        let two = StateVector::zero(2).unwrap();
        assert!(close(two.amplitudes()[0], 1.0, 0.0));
        let five = StateVector::zero(5).unwrap();
        assert_eq!(five.dim(), 32);
        assert!(close(five.amplitudes()[0], 1.0, 0.0));
        assert!(five.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn zero_state_rejects_bad_counts() {
        assert!(matches!(StateVector::zero(0), Err(Error::Domain(_))));
        assert!(matches!(StateVector::zero(9), Err(Error::Domain(_))));
    }

    #[test]
    fn hadamard_and_ry_on_zero() {
        let s = StateVector::zero(1).unwrap();
        let h = s.apply_unitary(&gates::h(), &[0]).unwrap();
        assert!(close(h.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(h.amplitudes()[1], FRAC_1_SQRT_2, 0.0));
        let plus = s.apply_unitary(&gates::ry(FRAC_PI_2), &[0]).unwrap();
        assert!(close(plus.amplitudes()[0], FRAC_1_SQRT_2, 0.0));
        assert!(close(plus.amplitudes()[1], FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn cz_flips_sign_of_one_one() {
        let s = StateVector::basis(2, 3).unwrap();
        let out = s.apply_unitary(&gates::cz(), &[0, 1]).unwrap();
        assert!(close(out.amplitudes()[3], -1.0, 0.0));
    }

    #[test]
    fn cnot_operand_order() {
        // control = qubit 1, target = qubit 0; |q1 q0> = |10> -> |11>
        let s = StateVector::basis(2, 0b10).unwrap();
        let out = s.apply_unitary(&gates::cnot(), &[1, 0]).unwrap();
        assert!(close(out.amplitudes()[0b11], 1.0, 0.0));
    }

    #[test]
    fn rejects_non_unitary_and_duplicates() {
        let s = StateVector::zero(2).unwrap();
        let bad = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(matches!(s.apply_unitary(&bad, &[0]), Err(Error::Validation(_))));
        assert!(matches!(s.apply_unitary(&gates::cz(), &[1, 1]), Err(Error::Domain(_))));
        assert!(matches!(s.apply_unitary(&gates::h(), &[2]), Err(Error::Domain(_))));
    }
}
