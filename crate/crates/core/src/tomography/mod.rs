//! Two-qubit Pauli tomography: nine measurement settings, linear inversion,
//! projection onto physical states, and Bell-state fidelity.

mod demon;

pub use demon::{demon_pair_readout, heralded_bell_states, HeraldedPairs};

use crate::error::domain;
use crate::noise::{apply_confusion, mitigate_distribution, ReadoutConfusion};
use crate::rng::{self, streams};
use crate::sim::{c, gates, sample_distribution, CMatrix, DensityMatrix, Measure, StateVector};
use crate::Result;
use serde::Serialize;
use std::collections::BTreeMap;

pub const BASES: [char; 3] = ['X', 'Y', 'Z'];

/// Pre-measurement rotation taking the eigenbasis of `basis` to the computational basis.
pub fn basis_rotation(basis: char) -> Result<CMatrix> {
    match basis {
        'X' => Ok(gates::h()),
        'Y' => Ok(gates::h() * gates::s().adjoint()),
        'Z' => Ok(gates::identity(1)),
        other => Err(domain!("unknown measurement basis {other:?}")),
    }
}

/// The nine `(qubit 0, qubit 1)` basis pairs.
pub fn settings() -> Vec<(char, char)> {
    BASES.iter().flat_map(|&a| BASES.iter().map(move |&b| (a, b))).collect()
}

/// The fifteen non-identity two-qubit Pauli labels; the first letter acts on qubit 0.
pub fn pauli_labels() -> Vec<String> {
    let ps = ['I', 'X', 'Y', 'Z'];
    ps.iter()
        .flat_map(|&a| ps.iter().map(move |&b| format!("{a}{b}")))
        .filter(|l| l != "II")
        .collect()
}

/// `P_a (x) P_b` in register ordering (qubit 0 least significant).
pub fn pauli_matrix(label: &str) -> Result<CMatrix> {
    let chars: Vec<char> = label.chars().collect();
    if chars.len() != 2 {
        return Err(domain!("two-qubit Pauli label expected, got {label:?}"));
    }
    let check = |ch: char| {
        if "IXYZ".contains(ch) {
            Ok(gates::pauli(ch))
        } else {
            Err(domain!("unknown Pauli {ch:?} in {label:?}"))
        }
    };
    Ok(check(chars[1])?.kronecker(&check(chars[0])?))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasurementOptions {
    /// `None` for exact (infinite-shot) expectations.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Readout confusion of `(qubit 0, qubit 1)`.
    pub readout: Option<ReadoutConfusion>,
    /// Invert the readout confusion on each setting's frequencies.
    pub mitigate: bool,
}

/// Expectation values keyed by Pauli label (`"IX"` ... `"ZZ"`).
pub type PauliExpectations = BTreeMap<String, f64>;

/// Collects the fifteen Pauli expectations of a two-qubit state.
///
/// Correlators come from their own setting; each single-qubit expectation is
/// the average over the three settings that measure that qubit in its basis.
pub fn measure_expectations(rho: &DensityMatrix, opts: &MeasurementOptions) -> Result<PauliExpectations> {
    if rho.num_qubits() != 2 {
        return Err(domain!("tomography needs a 2-qubit state, got {} qubits", rho.num_qubits()));
    }
    if opts.shots == Some(0) {
        return Err(domain!("shots must be at least 1"));
    }
    let mut out = PauliExpectations::new();
    let mut singles: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (k, (b0, b1)) in settings().into_iter().enumerate() {
        let rotated = rho.apply_unitary(&basis_rotation(b0)?, &[0])?.apply_unitary(&basis_rotation(b1)?, &[1])?;
        let mut probs = rotated.probabilities(&[0, 1])?;
        if let Some(conf) = &opts.readout {
            probs = apply_confusion(&probs, conf)?;
        }
        if let Some(shots) = opts.shots {
            let mut rng = rng::stream(opts.seed, streams::TOMOGRAPHY_BASE + k as u64);
            let tallies = sample_distribution(&probs, shots, &mut rng)?;
            probs = tallies.iter().map(|&n| n as f64 / shots as f64).collect();
        }
        if let (Some(conf), true) = (&opts.readout, opts.mitigate) {
            probs = mitigate_distribution(&probs, conf)?;
        }
        let sign = |i: usize, mask: usize| if (i & mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let expect = |mask: usize| probs.iter().enumerate().map(|(i, p)| sign(i, mask) * p).sum::<f64>();
        out.insert(format!("{b0}{b1}"), expect(0b11));
        singles.entry(format!("{b0}I")).or_default().push(expect(0b01));
        singles.entry(format!("I{b1}")).or_default().push(expect(0b10));
    }
    for (label, v) in singles {
        out.insert(label, v.iter().sum::<f64>() / v.len() as f64);
    }
    Ok(out)
}

/// `rho = (1/4) sum <P> P` including the identity term.
pub fn linear_inversion(expectations: &PauliExpectations) -> Result<CMatrix> {
    let mut rho = gates::identity(2);
    for label in pauli_labels() {
        let v = *expectations.get(&label).ok_or_else(|| domain!("missing expectation {label}"))?;
        rho += pauli_matrix(&label)? * c(v, 0.0);
    }
    Ok(rho * c(0.25, 0.0))
}

/// Closest density matrix in Frobenius norm: eigenvalues are water-filled
/// onto the simplex (negative weight removed and spread evenly over the rest).
pub fn project_physical(rho_raw: &CMatrix) -> Result<DensityMatrix> {
    let herm = (rho_raw + rho_raw.adjoint()) * c(0.5, 0.0);
    let d = herm.nrows();
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut mu: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let trace: f64 = mu.iter().sum();
    if trace.abs() < 1e-300 {
        return Err(crate::Error::Numeric("cannot project a traceless matrix".into()));
    }
    mu.iter_mut().for_each(|m| *m /= trace);

    let mut i = mu.len();
    let mut deficit = 0.0;
    while i > 0 && mu[i - 1] + deficit / (i as f64) < 0.0 {
        deficit += mu[i - 1];
        mu[i - 1] = 0.0;
        i -= 1;
    }
    for m in mu.iter_mut().take(i) {
        *m += deficit / i as f64;
    }

    let mut out = CMatrix::zeros(d, d);
    for (k, &idx) in order.iter().enumerate() {
        if mu[k] == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(idx);
        out += v * v.adjoint() * c(mu[k], 0.0);
    }
    DensityMatrix::from_matrix(&out)
}

pub fn phi_plus() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_amplitudes(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).expect("normalized")
}

/// `<Phi+| rho |Phi+>` with `Phi+ = (|00> + |11>)/sqrt(2)`.
pub fn bell_fidelity(rho: &DensityMatrix) -> Result<f64> {
    rho.fidelity(&phi_plus())
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub expectations: PauliExpectations,
    pub rho_raw: CMatrix,
    pub rho_physical: DensityMatrix,
    pub bell_fidelity: f64,
}

/// Real and imaginary parts of a matrix as nested rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixParts {
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl MatrixParts {
    pub fn of(m: &CMatrix) -> Self {
        let rows = |f: fn(&crate::sim::C64) -> f64| m.row_iter().map(|r| r.iter().map(f).collect()).collect();
        Self { real: rows(|z| z.re), imag: rows(|z| z.im) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TomographyReport {
    pub expectations: PauliExpectations,
    pub rho_raw: MatrixParts,
    pub rho_physical: MatrixParts,
    pub bell_fidelity: f64,
}

impl TomographyResult {
    pub fn report(&self) -> TomographyReport {
        TomographyReport {
            expectations: self.expectations.clone(),
            rho_raw: MatrixParts::of(&self.rho_raw),
            rho_physical: MatrixParts::of(&self.rho_physical.to_matrix()),
            bell_fidelity: self.bell_fidelity,
        }
    }
}

/// Measure, invert, project and score against `Phi+`.
pub fn tomography(rho: &DensityMatrix, opts: &MeasurementOptions) -> Result<TomographyResult> {
    let expectations = measure_expectations(rho, opts)?;
    let rho_raw = linear_inversion(&expectations)?;
    let rho_physical = project_physical(&rho_raw)?;
    let bell_fidelity = bell_fidelity(&rho_physical)?;
    Ok(TomographyResult { expectations, rho_raw, rho_physical, bell_fidelity })
}
