use super::kernel::{apply_matrix, gather_bits};
use super::{c, check_targets, unitarity_deviation, CMatrix, StateVector, C64, MAX_QUBITS, VALIDATION_TOL};
use crate::error::{domain, Error};
use crate::Result;

/// Mixed state stored as a dense row-major `2^n x 2^n` matrix.
///
/// Entry `(row, col)` lives at flat index `(row << n) | col`, so the column
/// index occupies bit positions `0..n` and the row index `n..2n`. Gates act on
/// the row bits with `U` and on the column bits with `conj(U)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<Self> {
        Ok(StateVector::zero(n)?.to_density())
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let amps = psi.amplitudes();
        let mut data = Vec::with_capacity(amps.len() * amps.len());
        for a in amps {
            for b in amps {
                data.push(a * b.conj());
            }
        }
        Self { num_qubits: psi.num_qubits(), data }
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(domain!("qubit count {n} outside 1..={MAX_QUBITS}"));
        }
        let dim = 1usize << n;
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0 / dim as f64, 0.0);
        }
        Ok(Self { num_qubits: n, data })
    }

    /// Builds a density matrix from a square matrix after checking the
    /// Hermitian, unit-trace and positivity invariants.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(m)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: &CMatrix) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || dim < 2 || !dim.is_power_of_two() || dim > 1 << MAX_QUBITS {
            return Err(domain!("{}x{} is not a 2^n square matrix", m.nrows(), m.ncols()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(m[(i, j)]);
            }
        }
        Ok(Self { num_qubits: dim.trailing_zeros() as usize, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_row_slice(d, d, &self.data)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order (the Hermitian part is diagonalised).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.to_matrix();
        let herm = (&m + m.adjoint()) * c(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Checks Hermiticity and unit trace within `1e-10`, and minimum eigenvalue `>= -1e-9`.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::Validation(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Validation(format!("trace is {tr}, expected 1")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-9 {
            return Err(Error::Validation(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// `U rho U^dagger` on the ordered `targets`.
    pub fn apply_unitary(&self, matrix: &CMatrix, targets: &[usize]) -> Result<Self> {
        self.check_operator(matrix, targets)?;
        let dev = unitarity_deviation(matrix);
        if dev > VALIDATION_TOL {
            return Err(Error::Validation(format!("matrix is not unitary (deviation {dev:.3e})")));
        }
        let mut out = self.clone();
        out.conjugate_in_place(matrix, targets);
        Ok(out)
    }

    pub(crate) fn conjugate_in_place(&mut self, matrix: &CMatrix, targets: &[usize]) {
        let n = self.num_qubits;
        let rows: Vec<usize> = targets.iter().map(|t| t + n).collect();
        apply_matrix(&mut self.data, matrix, &rows);
        apply_matrix(&mut self.data, &matrix.map(|z| z.conj()), targets);
    }

    /// `sum_k K_k rho K_k^dagger`; the Kraus set must be trace preserving.
    pub fn apply_channel(&self, kraus: &[CMatrix], targets: &[usize]) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Validation("empty Kraus set".into()));
        }
        for k in kraus {
            self.check_operator(k, targets)?;
        }
        let local = 1usize << targets.len();
        let completeness = kraus
            .iter()
            .fold(CMatrix::zeros(local, local), |acc, k| acc + k.adjoint() * k);
        let dev = super::max_deviation_from_identity(&completeness);
        if dev > VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "Kraus set is not trace preserving (deviation {dev:.3e})"
            )));
        }
        let mut acc = vec![c(0.0, 0.0); self.data.len()];
        for k in kraus {
            let mut term = self.clone();
            term.conjugate_in_place(k, targets);
            for (a, t) in acc.iter_mut().zip(&term.data) {
                *a += t;
            }
        }
        Ok(Self { num_qubits: self.num_qubits, data: acc })
    }

    /// Depolarizing channel `rho -> (1 - lambda) rho + lambda (I/d (x) Tr_T rho)` on `targets`.
    pub fn depolarize(&self, targets: &[usize], lambda: f64) -> Result<Self> {
        check_targets(targets, self.num_qubits)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(domain!("depolarizing probability {lambda} outside [0, 1]"));
        }
        let mut out = self.clone();
        out.depolarize_in_place(targets, lambda);
        Ok(out)
    }

    pub(crate) fn depolarize_in_place(&mut self, targets: &[usize], lambda: f64) {
        if lambda == 0.0 {
            return;
        }
        let dim = self.dim();
        let local = 1usize << targets.len();
        let tmask: usize = targets.iter().map(|t| 1usize << t).sum();
        let offsets: Vec<usize> = (0..local)
            .map(|l| targets.iter().enumerate().map(|(j, &t)| ((l >> j) & 1) << t).sum())
            .collect();
        let old = self.data.clone();
        for v in self.data.iter_mut() {
            *v *= 1.0 - lambda;
        }
        let weight = lambda / local as f64;
        for row in (0..dim).filter(|r| r & tmask == 0) {
            for col in (0..dim).filter(|c| c & tmask == 0) {
                let s: C64 = offsets.iter().map(|o| old[(row | o) * dim + (col | o)]).sum();
                if s == c(0.0, 0.0) {
                    continue;
                }
                for o in &offsets {
                    self.data[(row | o) * dim + (col | o)] += s * weight;
                }
            }
        }
    }

    /// Reduced state on `keep`; output qubit `j` is input qubit `keep[j]`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(domain!("partial trace must keep at least one qubit"));
        }
        check_targets(keep, self.num_qubits)?;
        let dim = self.dim();
        let kdim = 1usize << keep.len();
        let kmask: usize = keep.iter().map(|q| 1usize << q).sum();
        let mut data = vec![c(0.0, 0.0); kdim * kdim];
        for row in 0..dim {
            for col in 0..dim {
                if row & !kmask != col & !kmask {
                    continue;
                }
                let (r, cc) = (gather_bits(row, keep), gather_bits(col, keep));
                data[r * kdim + cc] += self.data[row * dim + col];
            }
        }
        Ok(Self { num_qubits: keep.len(), data })
    }

    /// `<target| rho |target>`.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        if target.num_qubits() != self.num_qubits {
            return Err(domain!(
                "target has {} qubits, state has {}",
                target.num_qubits(),
                self.num_qubits
            ));
        }
        let amps = target.amplitudes();
        let d = self.dim();
        let mut acc = c(0.0, 0.0);
        for i in 0..d {
            let row: C64 = self.data[i * d..(i + 1) * d].iter().zip(amps).map(|(m, a)| m * a).sum();
            acc += amps[i].conj() * row;
        }
        Ok(acc.re.clamp(0.0, 1.0))
    }

    /// Convex combination `w self + (1 - w) other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if other.num_qubits != self.num_qubits {
            return Err(domain!("cannot mix {}- and {}-qubit states", self.num_qubits, other.num_qubits));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * w + b * (1.0 - w))
            .collect();
        Ok(Self { num_qubits: self.num_qubits, data })
    }

    /// Projects qubit `q` onto `|bit>` and renormalizes; returns the state and
    /// the outcome probability.
    pub fn project(&self, q: usize, bit: usize) -> Result<(Self, f64)> {
        check_targets(&[q], self.num_qubits)?;
        let d = self.dim();
        let mut out = self.clone();
        for row in 0..d {
            for col in 0..d {
                if (row >> q) & 1 != bit || (col >> q) & 1 != bit {
                    out.data[row * d + col] = c(0.0, 0.0);
                }
            }
        }
        let p = out.trace().re;
        if p <= 0.0 {
            return Err(Error::Numeric(format!("outcome {bit} on qubit {q} has zero probability")));
        }
        for v in out.data.iter_mut() {
            *v /= p;
        }
        Ok((out, p))
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Trace distance `||self - other||_1 / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = self.to_matrix() - other.to_matrix();
        let herm = (&diff + diff.adjoint()) * c(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().map(|v| v.abs()).sum::<f64>() / 2.0
    }

    pub(crate) fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        check_targets(qubits, self.num_qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for i in 0..self.dim() {
            probs[gather_bits(i, qubits)] += self.entry(i, i).re.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if total > 0.0 {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
        Ok(probs)
    }

    fn check_operator(&self, m: &CMatrix, targets: &[usize]) -> Result<()> {
        check_targets(targets, self.num_qubits)?;
        let local = 1usize << targets.len();
        if m.nrows() != local || m.ncols() != local {
            return Err(domain!("{}x{} operator does not act on {} qubits", m.nrows(), m.ncols(), targets.len()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> StateVector {
        let s = FRAC_1_SQRT_2;
        StateVector::from_amplitudes(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap()
    }

    fn depolarizing_kraus(lambda: f64) -> Vec<CMatrix> {
        let w0 = (1.0 - 3.0 * lambda / 4.0).sqrt();
        let w = (lambda / 4.0).sqrt();
        vec![
            gates::identity(1) * c(w0, 0.0),
            gates::x() * c(w, 0.0),
            gates::y() * c(w, 0.0),
            gates::z() * c(w, 0.0),
        ]
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = bell().to_density();
        let out = rho.apply_channel(&[gates::identity(1)], &[1]).unwrap();
        assert!(out.max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn full_depolarization_gives_maximally_mixed() {
        let plus = StateVector::zero(1).unwrap().apply_unitary(&gates::h(), &[0]).unwrap();
        let out = plus.to_density().apply_channel(&depolarizing_kraus(1.0), &[0]).unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-12);
    }

    #[test]
    fn tenth_depolarization_on_ground_state() {
        // (1 - 0.1) |0><0| + 0.1 I/2 = diag(0.95, 0.05)
        let rho = DensityMatrix::zero(1).unwrap();
        let out = rho.apply_channel(&depolarizing_kraus(0.1), &[0]).unwrap();
        assert!((out.entry(0, 0).re - 0.95).abs() < 1e-12);
        assert!((out.entry(1, 1).re - 0.05).abs() < 1e-12);
        let direct = rho.depolarize(&[0], 0.1).unwrap();
        assert!(direct.max_abs_diff(&out) < 1e-12);
    }

    #[test]
    fn rejects_non_trace_preserving_kraus() {
        let rho = DensityMatrix::zero(1).unwrap();
        let half = gates::identity(1) * c(0.5, 0.0);
        assert!(matches!(rho.apply_channel(&[half], &[0]), Err(Error::Validation(_))));
    }

    #[test]
    fn direct_two_qubit_depolarize_matches_pauli_kraus() {
        let lambda: f64 = 0.37;
        let labels = ['I', 'X', 'Y', 'Z'];
        let mut kraus = Vec::new();
        for a in labels {
            for b in labels {
                let w = if a == 'I' && b == 'I' { 1.0 - 15.0 * lambda / 16.0 } else { lambda / 16.0 };
                kraus.push(gates::pauli(a).kronecker(&gates::pauli(b)) * c(w.sqrt(), 0.0));
            }
        }
        let psi = StateVector::zero(3)
            .unwrap()
            .apply_unitary(&gates::h(), &[0])
            .unwrap()
            .apply_unitary(&gates::cnot(), &[0, 2])
            .unwrap()
            .apply_unitary(&gates::ry(0.7), &[1])
            .unwrap();
        let rho = psi.to_density();
        let a = rho.apply_channel(&kraus, &[2, 1]).unwrap();
        let b = rho.depolarize(&[1, 2], lambda).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let zz = DensityMatrix::zero(2).unwrap();
        let out = zz.partial_trace(&[0]).unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::zero(1).unwrap()) < 1e-15);

        let reduced = bell().to_density().partial_trace(&[0]).unwrap();
        assert!(reduced.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-12);

        let zero = StateVector::zero(1).unwrap();
        let plus = zero.apply_unitary(&gates::h(), &[0]).unwrap();
        let prod = zero.tensor(&plus).unwrap();
        let kept = prod.to_density().partial_trace(&[1]).unwrap();
        assert!(kept.max_abs_diff(&plus.to_density()) < 1e-12);

        assert!(matches!(zz.partial_trace(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn fidelity_examples() {
        let b = bell();
        assert!((b.to_density().fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((mixed.fidelity(&b).unwrap() - 0.25).abs() < 1e-12);
        let one = StateVector::zero(1).unwrap();
        assert!(matches!(mixed.fidelity(&one), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_catches_bad_matrices() {
        let mut m = CMatrix::identity(2, 2);
        assert!(DensityMatrix::from_matrix(&m).is_err());
        m[(0, 0)] = c(1.1, 0.0);
        m[(1, 1)] = c(-0.1, 0.0);
        assert!(DensityMatrix::from_matrix(&m).is_err());
    }
}
