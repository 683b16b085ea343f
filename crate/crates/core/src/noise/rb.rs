//! Randomized benchmarking by exact density-matrix simulation.
//!
//! Single-qubit RB draws uniformly from the 24-element Clifford group.
//! Two-qubit interleaved RB draws from the 11520-element two-qubit Clifford
//! group (each element run as one gate followed by local depolarizing noise on
//! both qubits) and interleaves a noisy CZ; the CZ error follows from the ratio
//! of the interleaved and reference decays.

use super::{execute::noisy_execute, NoiseModel};
use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{domain, Error};
use crate::rng::{self, streams};
use crate::sim::{c, gates, CMatrix, DensityMatrix};
use crate::Result;
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbResult {
    pub sequence_lengths: Vec<usize>,
    pub survival: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub error_per_gate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterleavedRbResult {
    pub reference: RbResult,
    pub interleaved: RbResult,
    /// `(d - 1)/d * (1 - alpha_int / alpha_ref)` with `d = 4`.
    pub cz_error: f64,
    pub cz_fidelity: f64,
}

/// The single-qubit Clifford group, generated from `H` and `S`.
pub fn one_qubit_cliffords() -> &'static [CMatrix] {
    static GROUP: OnceLock<Vec<CMatrix>> = OnceLock::new();
    GROUP.get_or_init(|| generate_group(2, &[gates::h(), gates::s()]))
}

/// The two-qubit Clifford group, generated from local `H`, `S` and `CZ`.
pub fn two_qubit_cliffords() -> &'static [CMatrix] {
    static GROUP: OnceLock<Vec<CMatrix>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let id = gates::identity(1);
        let gens = [
            gates::h().kronecker(&id),
            id.kronecker(&gates::h()),
            gates::s().kronecker(&id),
            id.kronecker(&gates::s()),
            gates::cz(),
        ];
        generate_group(4, &gens)
    })
}

/// Breadth-first closure of `generators` modulo global phase.
fn generate_group(dim: usize, generators: &[CMatrix]) -> Vec<CMatrix> {
    let id = CMatrix::identity(dim, dim);
    let mut seen = HashMap::new();
    seen.insert(phase_key(&id), ());
    let mut elements = vec![id];
    let mut next = 0;
    while next < elements.len() {
        let base = elements[next].clone();
        next += 1;
        for g in generators {
            let m = g * &base;
            if seen.insert(phase_key(&m), ()).is_none() {
                elements.push(m);
            }
        }
    }
    elements
}

fn phase_key(m: &CMatrix) -> Vec<i64> {
    let pivot = m.iter().find(|z| z.norm() > 1e-6).copied().unwrap_or(c(1.0, 0.0));
    let phase = pivot / pivot.norm();
    m.iter()
        .flat_map(|z| {
            let w = z / phase;
            [(w.re * 1e6).round() as i64, (w.im * 1e6).round() as i64]
        })
        .collect()
}

fn validate_lengths(lengths: &[usize], sequences: usize) -> Result<()> {
    if lengths.is_empty() || lengths[0] == 0 {
        return Err(domain!("sequence lengths must be non-empty and at least 1"));
    }
    if lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain!("sequence lengths must be strictly increasing"));
    }
    if sequences == 0 {
        return Err(domain!("at least one sequence per length is required"));
    }
    Ok(())
}

/// Ground-state survival of one sequence: `steps` gates, then the inverse of
/// their ideal product.
fn survival(num_qubits: usize, steps: &[Vec<GateOp>], model: &NoiseModel) -> Result<f64> {
    let dim = 1usize << num_qubits;
    let mut circuit = Circuit::new(num_qubits, "rb")?;
    let mut ideal = CMatrix::identity(dim, dim);
    for op in steps.iter().flatten() {
        ideal = embed(op, num_qubits) * ideal;
        circuit.push(op.clone())?;
    }
    let inverse = ideal.adjoint();
    for op in clifford_ops(&inverse, num_qubits)? {
        circuit.push(op)?;
    }
    let rho = noisy_execute(&circuit, model)?;
    Ok(rho.entry(0, 0).re.clamp(0.0, 1.0))
}

fn embed(op: &GateOp, num_qubits: usize) -> CMatrix {
    if num_qubits == op.arity() && op.qubits.iter().enumerate().all(|(k, &q)| q == num_qubits - 1 - k) {
        return op.matrix();
    }
    let c = Circuit::from_ops(num_qubits, "", vec![op.clone()]).expect("operands in range");
    c.unitary().expect("small register")
}

/// A Clifford as executable native operations: one unitary on a single
/// qubit, or one two-qubit unitary with local noise on both operands.
fn clifford_ops(m: &CMatrix, num_qubits: usize) -> Result<Vec<GateOp>> {
    if num_qubits == 1 {
        Ok(vec![GateOp::new(Gate::Unitary(m.clone()), vec![0])?])
    } else {
        // operand 0 is the most-significant local bit, i.e. qubit 1
        Ok(vec![GateOp::new(Gate::Unitary(m.clone()), vec![1, 0])?])
    }
}

/// Mean ground-state survival per length for single-qubit RB.
pub fn rb_survival(lengths: &[usize], model: &NoiseModel, sequences: usize, seed: u64) -> Result<Vec<f64>> {
    validate_lengths(lengths, sequences)?;
    let group = one_qubit_cliffords();
    average_survival(lengths, sequences, seed, 0, |rng, m| {
        let steps: Vec<Vec<GateOp>> = (0..m)
            .map(|_| clifford_ops(&group[rng.random_range(0..group.len())], 1))
            .collect::<Result<_>>()?;
        survival(1, &steps, model)
    })
}

/// Single-qubit RB under `model` (only `lambda_1q` matters).
pub fn rb_simulate(lengths: &[usize], model: &NoiseModel, sequences: usize, seed: u64) -> Result<RbResult> {
    fit_decay(lengths, &rb_survival(lengths, model, sequences, seed)?, 2)
}

/// Reference and CZ-interleaved survival curves for two-qubit RB.
///
/// Each random two-qubit Clifford is executed as one ideal gate followed by
/// `lambda_1q` depolarizing on each qubit; the interleaved CZ carries
/// `lambda_2q`.
pub fn interleaved_survival(
    lengths: &[usize],
    model: &NoiseModel,
    sequences: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    validate_lengths(lengths, sequences)?;
    let group = two_qubit_cliffords();
    let run = |interleave: bool, offset: u64| {
        average_survival(lengths, sequences, seed, offset, |rng, m| {
            let mut steps = Vec::with_capacity(2 * m);
            for _ in 0..m {
                steps.push(clifford_step(&group[rng.random_range(0..group.len())])?);
                if interleave {
                    steps.push(vec![GateOp::cz(0, 1)]);
                }
            }
            two_qubit_survival(&steps, model)
        })
    };
    Ok((run(false, 0)?, run(true, 1 << 20)?))
}

/// Fits both curves and extracts the CZ error from the ratio of decays.
pub fn fit_interleaved(lengths: &[usize], reference: &[f64], interleaved: &[f64]) -> Result<InterleavedRbResult> {
    let reference = fit_decay(lengths, reference, 4)?;
    let interleaved = fit_decay(lengths, interleaved, 4)?;
    let cz_error = 0.75 * (1.0 - interleaved.alpha / reference.alpha);
    Ok(InterleavedRbResult { reference, interleaved, cz_error, cz_fidelity: 1.0 - cz_error })
}

/// Two-qubit reference and CZ-interleaved RB.
pub fn rb_simulate_interleaved_cz(
    lengths: &[usize],
    model: &NoiseModel,
    sequences: usize,
    seed: u64,
) -> Result<InterleavedRbResult> {
    let (reference, interleaved) = interleaved_survival(lengths, model, sequences, seed)?;
    fit_interleaved(lengths, &reference, &interleaved)
}

fn clifford_step(m: &CMatrix) -> Result<Vec<GateOp>> {
    clifford_ops(m, 2)
}

/// Two-qubit analogue of [`survival`]: Clifford steps (and the final inverse)
/// get `lambda_1q` depolarizing on each qubit, CZ gets `lambda_2q` on the pair.
fn two_qubit_survival(steps: &[Vec<GateOp>], model: &NoiseModel) -> Result<f64> {
    let apply = |rho: DensityMatrix, op: &GateOp| -> Result<DensityMatrix> {
        let rho = rho.apply_unitary(&op.matrix(), &op.qubits)?;
        if matches!(op.gate, Gate::Cz) {
            rho.depolarize(&[0, 1], model.lambda_2q)
        } else {
            rho.depolarize(&[0], model.lambda_1q)?.depolarize(&[1], model.lambda_1q)
        }
    };
    let mut rho = DensityMatrix::zero(2)?;
    let mut ideal = CMatrix::identity(4, 4);
    for op in steps.iter().flatten() {
        ideal = embed(op, 2) * ideal;
        rho = apply(rho, op)?;
    }
    for op in clifford_ops(&ideal.adjoint(), 2)? {
        rho = apply(rho, &op)?;
    }
    Ok(rho.entry(0, 0).re.clamp(0.0, 1.0))
}

/// Mean survival per length; sequence `s` of length index `i` draws from its own stream.
fn average_survival<F>(lengths: &[usize], sequences: usize, seed: u64, offset: u64, one: F) -> Result<Vec<f64>>
where
    F: Fn(&mut rng::StreamRng, usize) -> Result<f64> + Sync,
{
    let jobs: Vec<(usize, usize)> = (0..lengths.len()).flat_map(|i| (0..sequences).map(move |s| (i, s))).collect();
    let run = |&(i, s): &(usize, usize)| {
        let id = streams::RB_BASE + offset + (i * sequences + s) as u64;
        one(&mut rng::stream(seed, id), lengths[i])
    };
    #[cfg(feature = "parallel")]
    let values: Vec<f64> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let values: Vec<f64> = jobs.iter().map(run).collect::<Result<_>>()?;
    Ok(values.chunks(sequences).map(|ch| ch.iter().sum::<f64>() / sequences as f64).collect())
}

/// Least-squares fit of `survival = A alpha^m + B` with `0 < alpha <= 1`.
///
/// For fixed `alpha` the problem is linear in `(A, B)`; `alpha` is found by a
/// grid scan followed by golden-section refinement. `dim` sets the reported
/// error per gate `(d - 1)/d * (1 - alpha)`.
pub fn fit_decay(lengths: &[usize], survival: &[f64], dim: usize) -> Result<RbResult> {
    if lengths.len() != survival.len() || lengths.len() < 2 {
        return Err(domain!("need at least two (length, survival) points"));
    }
    if survival.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numeric(format!("non-finite survival data {survival:?}")));
    }
    let result = |alpha: f64, a: f64, b: f64| {
        let d = dim as f64;
        RbResult {
            sequence_lengths: lengths.to_vec(),
            survival: survival.to_vec(),
            a,
            b,
            alpha,
            error_per_gate: (d - 1.0) / d * (1.0 - alpha),
        }
    };
    if survival.iter().all(|s| (s - 1.0).abs() < 1e-12) {
        return Ok(result(1.0, 0.0, 1.0));
    }

    let xs: Vec<f64> = lengths.iter().map(|&m| m as f64).collect();
    let residual = |alpha: f64| -> (f64, f64, f64) {
        let basis: Vec<f64> = xs.iter().map(|&m| alpha.powf(m)).collect();
        let n = xs.len() as f64;
        let (su, sy) = (basis.iter().sum::<f64>(), survival.iter().sum::<f64>());
        let suu = basis.iter().map(|u| u * u).sum::<f64>();
        let suy = basis.iter().zip(survival).map(|(u, y)| u * y).sum::<f64>();
        let det = n * suu - su * su;
        let (a, b) = if det.abs() < 1e-300 {
            (0.0, sy / n)
        } else {
            ((n * suy - su * sy) / det, (suu * sy - su * suy) / det)
        };
        let r = basis.iter().zip(survival).map(|(u, y)| (a * u + b - y).powi(2)).sum::<f64>();
        (r, a, b)
    };

    let grid = 2000;
    let mut best = (f64::INFINITY, 0.5);
    for k in 1..grid {
        let alpha = k as f64 / grid as f64;
        let r = residual(alpha).0;
        if r < best.0 {
            best = (r, alpha);
        }
    }
    let step = 1.0 / grid as f64;
    let (mut lo, mut hi) = ((best.1 - step).max(1e-9), (best.1 + step).min(1.0 - 1e-15));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (residual(x1).0, residual(x2).0);
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = residual(x1).0;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = residual(x2).0;
        }
    }
    let alpha = (lo + hi) / 2.0;
    let (r, a, b) = residual(alpha);
    if !(alpha > 0.0 && alpha <= 1.0) || !r.is_finite() || !a.is_finite() || !b.is_finite() {
        return Err(Error::Numeric(format!(
            "decay fit diverged: alpha {alpha}, A {a}, B {b}, residual {r}, lengths {lengths:?}, survival {survival:?}"
        )));
    }
    Ok(result(alpha, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::calibration::depolarizing_from_fidelity;

    #[test]
    fn group_orders() {
        assert_eq!(one_qubit_cliffords().len(), 24);
        assert_eq!(two_qubit_cliffords().len(), 11520);
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let lengths = [1, 2, 4, 8, 16, 32, 64];
        let s: Vec<f64> = lengths.iter().map(|&m| 0.45 * 0.97f64.powi(m as i32) + 0.5).collect();
        let r = fit_decay(&lengths, &s, 2).unwrap();
        assert!((r.alpha - 0.97).abs() < 1e-9, "{r:?}");
        assert!((r.a - 0.45).abs() < 1e-7 && (r.b - 0.5).abs() < 1e-7);
    }

    #[test]
    fn zero_noise_gives_unit_alpha() {
        let r = rb_simulate(&[1, 5, 10], &NoiseModel::ideal(), 3, 1).unwrap();
        assert!(r.survival.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(r.alpha, 1.0);
        assert_eq!(r.error_per_gate, 0.0);
    }

    #[test]
    fn one_qubit_error_recovered() {
        let lambda = depolarizing_from_fidelity(0.999, 1);
        let model = NoiseModel::gates_only(lambda, 0.0).unwrap();
        let r = rb_simulate(&[1, 10, 50, 100, 200, 400], &model, 10, 7).unwrap();
        assert!((r.error_per_gate - 0.001).abs() / 0.001 < 0.05, "{r:?}");
        assert!(r.survival.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn cz_error_recovered_by_interleaving() {
        let model = NoiseModel::gates_only(
            depolarizing_from_fidelity(0.999, 1),
            depolarizing_from_fidelity(0.991, 2),
        )
        .unwrap();
        let r = rb_simulate_interleaved_cz(&[1, 5, 10, 20, 40, 80], &model, 6, 3).unwrap();
        assert!((r.cz_error - 0.009).abs() / 0.009 < 0.10, "{r:?}");
    }

    #[test]
    fn bad_lengths_rejected() {
        assert!(rb_simulate(&[], &NoiseModel::ideal(), 1, 0).is_err());
        assert!(rb_simulate(&[3, 2], &NoiseModel::ideal(), 1, 0).is_err());
        assert!(rb_simulate(&[0, 2], &NoiseModel::ideal(), 1, 0).is_err());
    }
}
