use super::calibration;
use super::readout::{apply_confusion, ReadoutConfusion};
use crate::error::{domain, Error};
use crate::sim::{DensityMatrix, Measure};
use crate::Result;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Gate-attached depolarizing noise plus readout confusion.
///
/// Per-qubit readout entries are indexed by physical qubit; qubits beyond the
/// calibrated list read out ideally. A joint matrix covers `readout_qubits`
/// (local bit `j` is `readout_qubits[j]`).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub lambda_1q: f64,
    pub lambda_2q: f64,
    readout: ReadoutConfusion,
    readout_qubits: Vec<usize>,
}

impl NoiseModel {
    pub fn new(lambda_1q: f64, lambda_2q: f64, readout: ReadoutConfusion) -> Result<Self> {
        let qubits = (0..readout.num_qubits()).collect();
        Self::with_readout_qubits(lambda_1q, lambda_2q, readout, qubits)
    }

    pub fn with_readout_qubits(
        lambda_1q: f64,
        lambda_2q: f64,
        readout: ReadoutConfusion,
        readout_qubits: Vec<usize>,
    ) -> Result<Self> {
        for (name, l) in [("lambda_1q", lambda_1q), ("lambda_2q", lambda_2q)] {
            if !(0.0..=1.0).contains(&l) {
                return Err(domain!("{name} = {l} outside [0, 1]"));
            }
        }
        if readout_qubits.len() != readout.num_qubits() {
            return Err(domain!(
                "readout covers {} qubits but {} were named",
                readout.num_qubits(),
                readout_qubits.len()
            ));
        }
        crate::sim::check_targets(&readout_qubits, usize::MAX)?;
        Ok(Self { lambda_1q, lambda_2q, readout, readout_qubits })
    }

    /// No gate noise and perfect readout.
    pub fn ideal() -> Self {
        Self { lambda_1q: 0.0, lambda_2q: 0.0, readout: ReadoutConfusion::PerQubit(Vec::new()), readout_qubits: Vec::new() }
    }

    /// Gate noise with the calibrated per-qubit readout of the five-qubit device.
    pub fn with_device_readout(lambda_1q: f64, lambda_2q: f64) -> Result<Self> {
        Self::new(lambda_1q, lambda_2q, ReadoutConfusion::PerQubit(calibration::readout_fidelities()))
    }

    /// Gate noise only.
    pub fn gates_only(lambda_1q: f64, lambda_2q: f64) -> Result<Self> {
        Self::new(lambda_1q, lambda_2q, ReadoutConfusion::PerQubit(Vec::new()))
    }

    pub fn readout(&self) -> &ReadoutConfusion {
        &self.readout
    }

    pub fn readout_qubits(&self) -> &[usize] {
        &self.readout_qubits
    }

    pub fn has_gate_noise(&self) -> bool {
        self.lambda_1q > 0.0 || self.lambda_2q > 0.0
    }

    /// Per-qubit confusion for the physical register `qubits` (uncalibrated qubits are ideal).
    pub fn confusion_for(&self, qubits: &[usize]) -> Result<ReadoutConfusion> {
        match &self.readout {
            ReadoutConfusion::PerQubit(f) => {
                Ok(ReadoutConfusion::PerQubit(qubits.iter().map(|&q| f.get(q).copied().unwrap_or([1.0, 1.0])).collect()))
            }
            ReadoutConfusion::Joint(_) => {
                if qubits == self.readout_qubits.as_slice() {
                    Ok(self.readout.clone())
                } else {
                    Err(domain!("joint readout matrix covers {:?}, not {:?}", self.readout_qubits, qubits))
                }
            }
        }
    }

    /// Reported-outcome distribution when measuring the physical `qubits` of `rho`.
    pub fn measured_distribution(&self, rho: &DensityMatrix, qubits: &[usize]) -> Result<Vec<f64>> {
        match &self.readout {
            ReadoutConfusion::PerQubit(_) => {
                let probs = rho.probabilities(qubits)?;
                apply_confusion(&probs, &self.confusion_for(qubits)?)
            }
            ReadoutConfusion::Joint(_) => {
                let positions = qubits
                    .iter()
                    .map(|q| {
                        self.readout_qubits
                            .iter()
                            .position(|r| r == q)
                            .ok_or_else(|| domain!("qubit {q} is not covered by the joint readout matrix"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let full = apply_confusion(&rho.probabilities(&self.readout_qubits)?, &self.readout)?;
                let mut out = vec![0.0; 1 << qubits.len()];
                for (i, p) in full.iter().enumerate() {
                    out[crate::sim::kernel::gather_bits(i, &positions)] += p;
                }
                Ok(out)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("noise model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NoiseFile = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("noise file line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_file(file)
    }

    pub(crate) fn to_file(&self) -> NoiseFile {
        let readout = match &self.readout {
            ReadoutConfusion::PerQubit(f) => ReadoutFile { per_qubit: Some(f.clone()), joint: None, qubits: None },
            ReadoutConfusion::Joint(m) => ReadoutFile {
                per_qubit: None,
                joint: Some(m.row_iter().map(|r| r.iter().copied().collect()).collect()),
                qubits: Some(self.readout_qubits.clone()),
            },
        };
        NoiseFile { lambda_1q: self.lambda_1q, lambda_2q: self.lambda_2q, readout: Some(readout) }
    }

    pub(crate) fn from_file(file: NoiseFile) -> Result<Self> {
        let Some(readout) = file.readout else {
            return Self::gates_only(file.lambda_1q, file.lambda_2q);
        };
        match (readout.per_qubit, readout.joint) {
            (Some(_), Some(_)) => Err(domain!("readout must give either per_qubit or joint, not both")),
            (Some(f), None) => Self::new(file.lambda_1q, file.lambda_2q, ReadoutConfusion::per_qubit(f)?),
            (None, Some(rows)) => {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(domain!("joint readout matrix is not square"));
                }
                let m = DMatrix::from_row_iterator(d, d, rows.into_iter().flatten());
                let conf = ReadoutConfusion::joint(m)?;
                let k = conf.num_qubits();
                let qubits = readout.qubits.unwrap_or_else(|| {
                    if k == calibration::READOUT_QUBITS.len() {
                        calibration::READOUT_QUBITS.to_vec()
                    } else {
                        (0..k).collect()
                    }
                });
                Self::with_readout_qubits(file.lambda_1q, file.lambda_2q, conf, qubits)
            }
            (None, None) => Self::gates_only(file.lambda_1q, file.lambda_2q),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct NoiseFile {
    pub lambda_1q: f64,
    pub lambda_2q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<ReadoutFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct ReadoutFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_qubit: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
}
