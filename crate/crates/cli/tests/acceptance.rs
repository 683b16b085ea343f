//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per criterion
//! and exits non-zero if any criterion fails.

use demonsteer::circuit::Gate;
use demonsteer::noise::{
    apply_confusion, calibration, fit_lambda2, mitigate, mitigate_distribution, noisy_execute, rb_simulate,
    rb_simulate_interleaved_cz, total_variation, NoiseModel, ReadoutConfusion,
};
use demonsteer::rng;
use demonsteer::sim::{sample_distribution, Measure, MeasurementCounts};
use demonsteer::steering::{theoretical_s2, violation_sigmas, SteeringCircuits, SteeringExperiment, DEFAULT_GRID};
use demonsteer::tomography::{bell_fidelity, heralded_bell_states, tomography, MeasurementOptions};
use demonsteer::transpiler::DeviceTopology;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 2024;
const RB_LENGTHS: [usize; 7] = [1, 10, 25, 50, 100, 200, 400];

fn circuits() -> SteeringCircuits {
    SteeringCircuits::device().expect("device compile")
}

fn fitted_model() -> Result<(NoiseModel, f64), String> {
    let lambda_1q = calibration::depolarizing_from_fidelity(calibration::ONE_QUBIT_FIDELITY, 1);
    let base = NoiseModel::gates_only(lambda_1q, 0.0).map_err(|e| e.to_string())?;
    let fit = fit_lambda2(0.770, &base, &circuits()).map_err(|e| e.to_string())?;
    Ok((fit.model(&base).map_err(|e| e.to_string())?, fit.achieved_s2))
}

fn within_budget(pass: bool, elapsed: Duration, budget: Duration) -> bool {
    pass && elapsed <= budget
}

fn exact_law() -> Outcome {
    let start = Instant::now();
    let exp = SteeringExperiment::new(&circuits(), None).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in 0..=20 {
        let p = k as f64 * 0.05;
        let err = (exp.exact_s2(p).map_err(|e| e.to_string())? - theoretical_s2(p).map_err(|e| e.to_string())?).abs();
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    let pass = within_budget(worst <= 1e-10, elapsed, Duration::from_secs(5));
    Ok((pass, format!("max |S2 - (1+p)/2| = {worst:.3e} over 21 points in {:.2}s", elapsed.as_secs_f64())))
}

fn sampled_sweep() -> Outcome {
    let start = Instant::now();
    let exp = SteeringExperiment::new(&circuits(), None).map_err(|e| e.to_string())?;
    let rows = exp.sweep(&DEFAULT_GRID, 200, 2000, SEED).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut inside = true;
    let mut parts = Vec::new();
    for row in &rows {
        let target = theoretical_s2(row.p).map_err(|e| e.to_string())?;
        inside &= (row.s2_sampled - target).abs() <= 3.0 * row.stderr;
        parts.push(format!("p={}: {:.4}+-{:.4}", row.p, row.s2_sampled, row.stderr));
    }
    let at_one = rows.iter().find(|r| r.p == 1.0).map(|r| r.stderr).unwrap_or(f64::NAN);
    let pass = within_budget(inside && at_one <= 0.005, elapsed, Duration::from_secs(120));
    Ok((pass, format!("{}; stderr(p=1) = {at_one:.4}; {:.1}s", parts.join(", "), elapsed.as_secs_f64())))
}

fn peak_fit() -> Outcome {
    let (model, achieved) = fitted_model()?;
    let exp = SteeringExperiment::new(&circuits(), Some(&model)).map_err(|e| e.to_string())?;
    let s0 = exp.exact_s2(0.0).map_err(|e| e.to_string())?;
    let s1 = exp.exact_s2(1.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in 0..=20 {
        let p = k as f64 * 0.05;
        worst = worst.max((exp.exact_s2(p).map_err(|e| e.to_string())? - (s0 + p * (s1 - s0))).abs());
    }
    let pass = (achieved - 0.770).abs() <= 1e-4 && worst <= 1e-8;
    Ok((
        pass,
        format!(
            "lambda_1q = {:.4e}, fitted lambda_2q = {:.6e}, S2(1) = {achieved:.8}, affine deviation {worst:.2e}",
            model.lambda_1q, model.lambda_2q
        ),
    ))
}

fn significance() -> Outcome {
    let sigmas = violation_sigmas(0.770, 0.005).map_err(|e| e.to_string())?;
    Ok(((sigmas - 12.58).abs() <= 0.05, format!("violation_sigmas(0.770, 0.005) = {sigmas:.4}")))
}

fn compilation() -> Outcome {
    let topo = DeviceTopology::grid5();
    let sc = circuits();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, compiled) in sc.all().into_iter().enumerate() {
        let two_qubit: Vec<_> = compiled.circuit.ops().iter().filter(|op| op.arity() == 2).collect();
        let on_edges = two_qubit.iter().all(|op| matches!(op.gate, Gate::Cz) && topo.is_edge(op.qubits[0], op.qubits[1]));
        let deviation = compiled.report.equivalence.as_ref().map(|e| e.max_deviation).unwrap_or(f64::INFINITY);
        let needs_swap = i < 2;
        let swaps_ok = !needs_swap || compiled.report.swaps >= 1;
        pass &= on_edges && swaps_ok && deviation <= 1e-9;
        parts.push(format!(
            "{}: {} CZ on edges={on_edges}, swaps {}, deviation {deviation:.1e}",
            compiled.report.label, compiled.report.cz_gates, compiled.report.swaps
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn bell_claims() -> Outcome {
    let clean = heralded_bell_states(None).map_err(|e| e.to_string())?;
    let noiseless = clean.states.iter().map(bell_fidelity).collect::<demonsteer::Result<Vec<_>>>().map_err(|e| e.to_string())?;
    let noiseless_min = noiseless.iter().cloned().fold(f64::INFINITY, f64::min);

    let (model, _) = fitted_model()?;
    let noisy = heralded_bell_states(Some(&model)).map_err(|e| e.to_string())?;
    let mut reconstructed = Vec::new();
    for (k, state) in noisy.states.iter().enumerate() {
        let opts = MeasurementOptions { shots: Some(2000), seed: SEED + k as u64, ..Default::default() };
        reconstructed.push(tomography(state, &opts).map_err(|e| e.to_string())?.bell_fidelity);
    }
    let mean = (reconstructed[0] + reconstructed[1]) / 2.0;
    let pass = noiseless_min >= 1.0 - 1e-10 && (0.90..=0.98).contains(&mean);
    Ok((
        pass,
        format!(
            "noiseless min fidelity {noiseless_min:.12}; fitted-noise reconstructed b0 {:.4}, b1 {:.4}, mean {mean:.4} (band [0.90, 0.98])",
            reconstructed[0], reconstructed[1]
        ),
    ))
}

fn mitigation() -> Outcome {
    let calibrated: Vec<[f64; 2]> = calibration::F_G.iter().zip(calibration::F_E).map(|(&g, e)| [g, e]).collect();
    let conf = ReadoutConfusion::per_qubit(calibrated).map_err(|e| e.to_string())?;
    let sc = circuits();
    let rho = noisy_execute(&sc.branches[0].circuit, &NoiseModel::ideal()).map_err(|e| e.to_string())?;
    let truth = rho.probabilities(&calibration::READOUT_QUBITS).map_err(|e| e.to_string())?;
    let noisy = apply_confusion(&truth, &conf).map_err(|e| e.to_string())?;
    let round_trip = total_variation(&mitigate_distribution(&noisy, &conf).map_err(|e| e.to_string())?, &truth);

    let mut wins = 0;
    for trial in 0..100u64 {
        let mut stream = rng::stream(SEED + trial, rng::streams::TRIAL_BASE);
        let tallies = sample_distribution(&noisy, 2000, &mut stream).map_err(|e| e.to_string())?;
        let counts = MeasurementCounts::from_tallies(calibration::READOUT_QUBITS.to_vec(), &tallies).map_err(|e| e.to_string())?;
        let raw = counts.frequencies().map_err(|e| e.to_string())?;
        let fixed = mitigate(&counts, &conf).map_err(|e| e.to_string())?;
        if total_variation(&fixed, &truth) <= total_variation(&raw, &truth) {
            wins += 1;
        }
    }
    let pass = round_trip <= 1e-9 && wins >= 95;
    Ok((pass, format!("exact round-trip TV {round_trip:.2e}; mitigated no worse than raw in {wins}/100 sampled trials")))
}

fn randomized_benchmarking() -> Outcome {
    let start = Instant::now();
    let injected_1q = 1.0 - calibration::ONE_QUBIT_FIDELITY;
    let injected_cz = 1.0 - calibration::CZ_FIDELITY;
    let model = NoiseModel::gates_only(
        calibration::depolarizing_from_fidelity(calibration::ONE_QUBIT_FIDELITY, 1),
        calibration::depolarizing_from_fidelity(calibration::CZ_FIDELITY, 2),
    )
    .map_err(|e| e.to_string())?;
    let one = rb_simulate(&RB_LENGTHS, &model, 20, SEED).map_err(|e| e.to_string())?;
    let two = rb_simulate_interleaved_cz(&RB_LENGTHS, &model, 20, SEED).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rel_1q = (one.error_per_gate - injected_1q).abs() / injected_1q;
    let rel_cz = (two.cz_error - injected_cz).abs() / injected_cz;
    let pass = within_budget(rel_1q <= 0.05 && rel_cz <= 0.10, elapsed, Duration::from_secs(60));
    Ok((
        pass,
        format!(
            "1q error {:.4e} ({:.2}% off), CZ error {:.4e} ({:.2}% off), {:.1}s",
            one.error_per_gate,
            100.0 * rel_1q,
            two.cz_error,
            100.0 * rel_cz,
            elapsed.as_secs_f64()
        ),
    ))
}

fn cli(args: &[&str], out: &Path, workers: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_demonsteer"))
        .args(args)
        .args(["--seed", "7", "--workers", &workers.to_string(), "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&status.stderr)));
    }
    Ok(())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    type Run<'a> = (&'a str, &'a [&'a str], &'a [&'a str]);
    let runs: [Run; 3] = [
        ("steer", &["steer", "--groups", "20", "--shots", "200"], &["sweep.csv", "steer_report.json"]),
        ("tomo", &["tomo", "--branch", "b1", "--shots", "500"], &["tomography.json"]),
        ("rb", &["rb", "--lengths", "1,8,32", "--sequences", "6", "--two-qubit"], &["rb.csv", "rb_fit.json"]),
    ];
    let mut mismatched = Vec::new();
    for (name, args, files) in runs {
        let dirs: Vec<_> = [1usize, 4]
            .iter()
            .map(|&w| {
                let out = dir.path().join(format!("{name}-{w}"));
                cli(args, &out, w).map(|_| out)
            })
            .collect::<Result<_, _>>()?;
        for file in files {
            let a = std::fs::read(dirs[0].join(file)).map_err(|e| format!("{file}: {e}"))?;
            let b = std::fs::read(dirs[1].join(file)).map_err(|e| format!("{file}: {e}"))?;
            if a != b {
                mismatched.push(format!("{name}/{file}"));
            }
        }
    }
    let detail = if mismatched.is_empty() {
        "steer, tomo and rb payloads byte-identical with 1 and 4 workers".to_string()
    } else {
        format!("payloads differ: {}", mismatched.join(", "))
    };
    Ok((mismatched.is_empty(), detail))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact steering law", exact_law),
        ("sampled sweep at 200 x 2000", sampled_sweep),
        ("S2(1) = 0.770 noise fit", peak_fit),
        ("violation significance", significance),
        ("device compilation", compilation),
        ("Bell-state fidelities", bell_claims),
        ("readout mitigation", mitigation),
        ("randomized benchmarking", randomized_benchmarking),
        ("worker-count determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failures += 1;
        }
        println!("criterion {} ({name}): {} - {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
