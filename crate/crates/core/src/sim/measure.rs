use super::{DensityMatrix, StateVector};
use crate::error::{domain, Error};
use crate::rng::{self, StreamRng};
use crate::Result;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Anything that yields Born-rule outcome probabilities.
pub trait Measure {
    /// Probabilities over `qubits`, indexed so that `qubits[j]` is bit `j`.
    fn probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>>;
}

impl Measure for StateVector {
    fn probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.marginal(qubits)
    }
}

impl Measure for DensityMatrix {
    fn probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.marginal(qubits)
    }
}

/// Histogram of measured bitstrings.
///
/// Bitstrings are written most-significant qubit first: for
/// `qubits = [q_a, q_b]` the key `"10"` means `q_b = 1, q_a = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementCounts {
    pub qubits: Vec<usize>,
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl MeasurementCounts {
    /// Builds counts from per-outcome tallies indexed by local outcome index.
    pub fn from_tallies(qubits: Vec<usize>, tallies: &[u64]) -> Result<Self> {
        if tallies.len() != 1 << qubits.len() {
            return Err(domain!("{} tallies for {} qubits", tallies.len(), qubits.len()));
        }
        let width = qubits.len();
        let counts = tallies
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (bitstring(i, width), n))
            .collect();
        Ok(Self { qubits, counts, shots: tallies.iter().sum() })
    }

    /// Builds counts from explicit bitstring keys.
    pub fn from_map(qubits: Vec<usize>, counts: BTreeMap<String, u64>) -> Result<Self> {
        let width = qubits.len();
        for key in counts.keys() {
            if key.len() != width || !key.chars().all(|ch| ch == '0' || ch == '1') {
                return Err(domain!("bitstring {key:?} does not match {width} qubits"));
            }
        }
        let shots = counts.values().sum();
        Ok(Self { qubits, counts, shots })
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&bitstring(index, self.width())).copied().unwrap_or(0)
    }

    pub fn tallies(&self) -> Vec<u64> {
        (0..1usize << self.width()).map(|i| self.count(i)).collect()
    }

    /// Empirical frequencies indexed by local outcome index.
    pub fn frequencies(&self) -> Result<Vec<f64>> {
        if self.shots == 0 {
            return Err(domain!("no shots recorded"));
        }
        Ok(self.tallies().iter().map(|&n| n as f64 / self.shots as f64).collect())
    }
}

/// Renders local outcome `index` as a `width`-character bitstring, MSB first.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width).rev().map(|b| if (index >> b) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Draws `shots` outcomes from `probs` with the supplied generator.
pub fn sample_distribution(probs: &[f64], shots: u64, rng: &mut StreamRng) -> Result<Vec<u64>> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Numeric("distribution has negative or non-finite entries".into()));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numeric("distribution has zero mass".into()));
    }
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p / total;
        cumulative.push(acc);
    }
    let last_nonzero = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut tallies = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let idx = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
        tallies[idx] += 1;
    }
    Ok(tallies)
}

/// Samples `shots` measurements of `qubits` from `state` on stream `(seed, 0)`.
pub fn sample_counts<S: Measure + ?Sized>(
    state: &S,
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<MeasurementCounts> {
    if shots == 0 {
        return Err(domain!("shots must be at least 1"));
    }
    let probs = state.probabilities(qubits)?;
    let mut rng = rng::stream(seed, rng::streams::SAMPLE);
    let tallies = sample_distribution(&probs, shots, &mut rng)?;
    MeasurementCounts::from_tallies(qubits.to_vec(), &tallies)
}
