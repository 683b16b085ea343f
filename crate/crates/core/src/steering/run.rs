use super::circuits::{outcome_table, setting_correlator, OutcomeTable, SteeringCircuits};
use crate::error::domain;
use crate::format::format_sig;
use crate::noise::NoiseModel;
use crate::rng::{self, streams};
use crate::sim::MeasurementCounts;
use crate::Result;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest `S2` reachable without steering.
pub const CLASSICAL_BOUND: f64 = FRAC_1_SQRT_2;
/// Group-bootstrap resamples behind every standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 500;
/// Groups drawn (with replacement) into each bootstrap set.
pub const BOOTSTRAP_SET_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SteeringConfig {
    pub p: f64,
    pub groups: usize,
    pub shots_per_group: u64,
    pub seed: u64,
    pub noise: Option<NoiseModel>,
}

impl SteeringConfig {
    pub fn validate(&self) -> Result<()> {
        validate_p(self.p)?;
        if self.groups == 0 || self.shots_per_group == 0 {
            return Err(domain!("groups and shots per group must be at least 1"));
        }
        Ok(())
    }
}

fn validate_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("demon probability p = {p} outside [0, 1]"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlators {
    pub sigma_z: f64,
    pub sigma_x: f64,
}

impl Correlators {
    pub fn s2(&self) -> f64 {
        (self.sigma_z + self.sigma_x) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringReport {
    pub p: f64,
    pub per_setting_correlators: Correlators,
    pub s2: f64,
    pub s2_stderr: f64,
    /// `None` when the standard error vanishes (exact evaluation).
    pub sigmas_above_bound: Option<f64>,
    pub classical_bound: f64,
    pub groups: usize,
    pub shots_per_group: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub s2_exact: f64,
    pub s2_sampled: f64,
    pub stderr: f64,
    pub sigmas_above_bound: Option<f64>,
}

/// `(N00 + N11 - N01 - N10) / shots` of a two-qubit histogram.
pub fn correlator(counts: &MeasurementCounts) -> Result<f64> {
    if counts.width() != 2 {
        return Err(domain!("correlator needs counts over 2 qubits, got {}", counts.width()));
    }
    if counts.shots == 0 {
        return Err(domain!("correlator of an empty histogram"));
    }
    let t = counts.tallies();
    Ok((t[0] as f64 + t[3] as f64 - t[1] as f64 - t[2] as f64) / counts.shots as f64)
}

/// Ideal law `S2(p) = (1 + p) / 2`.
pub fn theoretical_s2(p: f64) -> Result<f64> {
    validate_p(p)?;
    Ok((1.0 + p) / 2.0)
}

/// Standard deviations by which `s2` exceeds the classical bound.
pub fn violation_sigmas(s2: f64, stderr: f64) -> Result<f64> {
    if stderr.is_nan() || stderr <= 0.0 {
        return Err(domain!("standard error must be positive, got {stderr}"));
    }
    Ok((s2 - CLASSICAL_BOUND) / stderr)
}

/// Exact outcome tables of the three sub-circuits under one noise model.
#[derive(Debug, Clone)]
pub struct SteeringExperiment {
    branches: [OutcomeTable; 2],
    no_demon: OutcomeTable,
    branch_correlators: [Correlators; 2],
    no_demon_correlators: Correlators,
}

fn correlators_of(t: &OutcomeTable) -> Result<Correlators> {
    Ok(Correlators { sigma_z: setting_correlator(t, 0)?, sigma_x: setting_correlator(t, 1)? })
}

impl SteeringExperiment {
    pub fn new(circuits: &SteeringCircuits, noise: Option<&NoiseModel>) -> Result<Self> {
        let b0 = outcome_table(&circuits.branches[0], noise)?;
        let b1 = outcome_table(&circuits.branches[1], noise)?;
        let nd = outcome_table(&circuits.no_demon, noise)?;
        Ok(Self {
            branch_correlators: [correlators_of(&b0)?, correlators_of(&b1)?],
            no_demon_correlators: correlators_of(&nd)?,
            branches: [b0, b1],
            no_demon: nd,
        })
    }

    pub fn branch_correlators(&self) -> [Correlators; 2] {
        self.branch_correlators
    }

    pub fn no_demon_correlators(&self) -> Correlators {
        self.no_demon_correlators
    }

    /// Per-setting correlators of the `p`-mixture: each circuit's correlator
    /// weighted by how often it runs.
    pub fn exact_correlators(&self, p: f64) -> Result<Correlators> {
        validate_p(p)?;
        let [b0, b1] = self.branch_correlators;
        let nd = self.no_demon_correlators;
        let mix = |d0: f64, d1: f64, n: f64| p * (d0 + d1) / 2.0 + (1.0 - p) * n;
        Ok(Correlators {
            sigma_z: mix(b0.sigma_z, b1.sigma_z, nd.sigma_z),
            sigma_x: mix(b0.sigma_x, b1.sigma_x, nd.sigma_x),
        })
    }

    pub fn exact_s2(&self, p: f64) -> Result<f64> {
        Ok(self.exact_correlators(p)?.s2())
    }

    pub fn exact_report(&self, p: f64) -> Result<SteeringReport> {
        let c = self.exact_correlators(p)?;
        Ok(SteeringReport {
            p,
            per_setting_correlators: c,
            s2: c.s2(),
            s2_stderr: 0.0,
            sigmas_above_bound: None,
            classical_bound: CLASSICAL_BOUND,
            groups: 0,
            shots_per_group: 0,
        })
    }

    /// Shot-sampled run: every shot activates the demon with probability `p`
    /// (coin uniform) and otherwise runs the no-demon circuit.
    ///
    /// `S2` pools all groups. Its error bar is the spread of `S2` over
    /// [`BOOTSTRAP_RESAMPLES`] sets of [`BOOTSTRAP_SET_SIZE`] groups drawn with
    /// replacement, i.e. the scatter of a five-group measurement.
    pub fn sample(&self, p: f64, groups: usize, shots: u64, seed: u64) -> Result<SteeringReport> {
        self.sample_point(p, groups, shots, seed, 0)
    }

    /// As [`Self::sample`], drawing from the stream family of sweep point `point`.
    pub fn sample_point(&self, p: f64, groups: usize, shots: u64, seed: u64, point: u64) -> Result<SteeringReport> {
        validate_p(p)?;
        if groups == 0 || shots == 0 {
            return Err(domain!("groups and shots per group must be at least 1"));
        }
        let cumulative = |t: &OutcomeTable| {
            let total: f64 = t.iter().sum();
            let mut acc = 0.0;
            t.map(|x| {
                acc += x / total;
                acc
            })
        };
        let cdfs = [cumulative(&self.branches[0]), cumulative(&self.branches[1]), cumulative(&self.no_demon)];
        let group_base = streams::GROUP_BASE + (point << 24);
        let run_group = |g: usize| -> [u64; 8] {
            let mut rng = rng::stream(seed, group_base + g as u64);
            let mut tally = [0u64; 8];
            for _ in 0..shots {
                let which = if rng.random::<f64>() < p { usize::from(rng.random::<bool>()) } else { 2 };
                let u: f64 = rng.random();
                let idx = cdfs[which].partition_point(|&c| c <= u).min(7);
                tally[idx] += 1;
            }
            tally
        };
        #[cfg(feature = "parallel")]
        let tallies: Vec<[u64; 8]> = {
            use rayon::prelude::*;
            (0..groups).into_par_iter().map(run_group).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let tallies: Vec<[u64; 8]> = (0..groups).map(run_group).collect();

        let pooled = pooled_correlators(tallies.iter())?;
        let mut rng = rng::stream(seed, streams::BOOTSTRAP + point);
        let mut estimates = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
        let set = BOOTSTRAP_SET_SIZE.min(groups);
        for _ in 0..BOOTSTRAP_RESAMPLES {
            let pick = (0..set).map(|_| &tallies[rng.random_range(0..groups)]);
            estimates.push(pooled_correlators(pick)?.s2());
        }
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (estimates.len() - 1) as f64;
        let stderr = var.sqrt();
        let s2 = pooled.s2();
        Ok(SteeringReport {
            p,
            per_setting_correlators: pooled,
            s2,
            s2_stderr: stderr,
            sigmas_above_bound: violation_sigmas(s2, stderr).ok(),
            classical_bound: CLASSICAL_BOUND,
            groups,
            shots_per_group: shots,
        })
    }

    /// Exact and sampled `S2` at every grid point.
    pub fn sweep(&self, grid: &[f64], groups: usize, shots: u64, seed: u64) -> Result<Vec<SweepRow>> {
        grid.iter()
            .enumerate()
            .map(|(i, &p)| {
                let sampled = self.sample_point(p, groups, shots, seed, i as u64)?;
                Ok(SweepRow {
                    p,
                    s2_exact: self.exact_s2(p)?,
                    s2_sampled: sampled.s2,
                    stderr: sampled.s2_stderr,
                    sigmas_above_bound: sampled.sigmas_above_bound,
                })
            })
            .collect()
    }
}

fn pooled_correlators<'a>(tallies: impl Iterator<Item = &'a [u64; 8]>) -> Result<Correlators> {
    let mut sum = [0u64; 8];
    for t in tallies {
        for (s, v) in sum.iter_mut().zip(t) {
            *s += v;
        }
    }
    let corr = |a: usize| -> Result<f64> {
        let n = &sum[a * 4..a * 4 + 4];
        let total: u64 = n.iter().sum();
        if total == 0 {
            return Err(crate::Error::Numeric(format!("no shots recorded for setting {a}")));
        }
        Ok((n[0] as f64 + n[3] as f64 - n[1] as f64 - n[2] as f64) / total as f64)
    };
    Ok(Correlators { sigma_z: corr(0)?, sigma_x: corr(1)? })
}

/// Sampled steering run for one configuration.
pub fn run_steering(config: &SteeringConfig, circuits: &SteeringCircuits) -> Result<SteeringReport> {
    config.validate()?;
    SteeringExperiment::new(circuits, config.noise.as_ref())?.sample(
        config.p,
        config.groups,
        config.shots_per_group,
        config.seed,
    )
}

pub const SWEEP_CSV_HEADER: &str = "p,s2_exact,s2_sampled,stderr,sigmas_above_bound";

/// Sweep table as CSV; an undefined significance is written as an empty field.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let sigmas = r.sigmas_above_bound.map(format_sig).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_sig(r.p),
            format_sig(r.s2_exact),
            format_sig(r.s2_sampled),
            format_sig(r.stderr),
            sigmas
        ));
    }
    out
}

/// Default grid of demon probabilities for a sweep.
pub const DEFAULT_GRID: [f64; 5] = [0.0, 0.2, 0.4, 0.8, 1.0];
