use super::NoiseModel;
use crate::error::{domain, Error};
use crate::steering::{SteeringCircuits, SteeringExperiment};
use crate::Result;
use serde::Serialize;

/// Bisection stops once the exact `S2(1)` is this close to the target.
pub const FIT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BisectionStep {
    pub lo: f64,
    pub hi: f64,
    pub lambda_2q: f64,
    pub s2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda2Fit {
    pub target_s2: f64,
    pub lambda_1q: f64,
    pub lambda_2q: f64,
    pub achieved_s2: f64,
    /// `(lambda_2q, S2(1))` on the monotonicity grid.
    pub monotonicity_grid: Vec<(f64, f64)>,
    pub trace: Vec<BisectionStep>,
}

impl Lambda2Fit {
    /// The fitted model with the base model's readout.
    pub fn model(&self, base: &NoiseModel) -> Result<NoiseModel> {
        NoiseModel::with_readout_qubits(self.lambda_1q, self.lambda_2q, base.readout().clone(), base.readout_qubits().to_vec())
    }
}

fn s2_at(base: &NoiseModel, lambda_2q: f64, circuits: &SteeringCircuits) -> Result<f64> {
    let model =
        NoiseModel::with_readout_qubits(base.lambda_1q, lambda_2q, base.readout().clone(), base.readout_qubits().to_vec())?;
    SteeringExperiment::new(circuits, Some(&model))?.exact_s2(1.0)
}

/// Finds the CZ depolarizing rate for which the exact `S2(p = 1)` equals
/// `target`, keeping `base.lambda_1q` and `base`'s readout fixed.
///
/// `S2(1)` must be strictly decreasing on `lambda_2q in {0, 0.01, ..., 0.2}`;
/// this is checked before bisecting.
pub fn fit_lambda2(target: f64, base: &NoiseModel, circuits: &SteeringCircuits) -> Result<Lambda2Fit> {
    if !(target > 0.5 && target <= 1.0) {
        return Err(domain!("target S2 {target} outside (0.5, 1]"));
    }
    let grid: Vec<(f64, f64)> = (0..=20)
        .map(|k| {
            let l = k as f64 / 100.0;
            s2_at(base, l, circuits).map(|s| (l, s))
        })
        .collect::<Result<_>>()?;
    if let Some(w) = grid.windows(2).find(|w| w[1].1 >= w[0].1) {
        return Err(Error::Fit(format!(
            "S2(1) is not strictly decreasing in lambda_2q: S2({}) = {}, S2({}) = {}",
            w[0].0, w[0].1, w[1].0, w[1].1
        )));
    }
    let result = |lambda_2q: f64, achieved_s2: f64, trace: Vec<BisectionStep>| Lambda2Fit {
        target_s2: target,
        lambda_1q: base.lambda_1q,
        lambda_2q,
        achieved_s2,
        monotonicity_grid: grid.clone(),
        trace,
    };
    let s0 = grid[0].1;
    if (s0 - target).abs() <= FIT_TOLERANCE {
        return Ok(result(0.0, s0, Vec::new()));
    }
    if s0 < target {
        return Err(Error::Fit(format!(
            "target {target} unreachable: S2(1) is {s0} already without two-qubit noise"
        )));
    }

    // bracket [lo, hi] with S2(lo) > target > S2(hi), scanning 0.01 steps up to 1
    let (mut lo, mut hi) = (0.0, f64::NAN);
    for k in 1..=100usize {
        let l = k as f64 / 100.0;
        let s = match grid.get(k) {
            Some(&(_, s)) => s,
            None => s2_at(base, l, circuits)?,
        };
        if (s - target).abs() <= FIT_TOLERANCE {
            return Ok(result(l, s, Vec::new()));
        }
        if s < target {
            hi = l;
            break;
        }
        lo = l;
    }
    if hi.is_nan() {
        return Err(Error::Fit(format!("target {target} unreachable: S2(1) stays above it for lambda_2q in [0, 1]")));
    }

    let mut trace = Vec::new();
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        let s = s2_at(base, mid, circuits)?;
        trace.push(BisectionStep { lo, hi, lambda_2q: mid, s2: s });
        if (s - target).abs() <= FIT_TOLERANCE || hi - lo < 1e-15 {
            return Ok(result(mid, s, trace));
        }
        if s > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Fit(format!("bisection did not converge; last bracket [{lo}, {hi}]")))
}
