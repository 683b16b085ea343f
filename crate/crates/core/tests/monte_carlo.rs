//! Seeded Monte Carlo checks of the sampled estimators.

use demonsteer::noise::{apply_confusion, mitigate, total_variation, NoiseModel, ReadoutConfusion};
use demonsteer::rng;
use demonsteer::sim::{sample_distribution, MeasurementCounts};
use demonsteer::steering::{correlator, outcome_table, setting_correlator, SteeringCircuits, SteeringExperiment};
use demonsteer::tomography::{phi_plus, tomography, MeasurementOptions};

#[test]
fn sampled_s2_within_three_stderr() {
    let exp = SteeringExperiment::new(&SteeringCircuits::device().unwrap(), None).unwrap();
    let exact = exp.exact_s2(0.6).unwrap();
    let hits = (0..100u64)
        .filter(|&seed| {
            let r = exp.sample(0.6, 20, 200, seed).unwrap();
            (r.s2 - exact).abs() <= 3.0 * r.s2_stderr
        })
        .count();
    assert!(hits >= 99, "{hits}/100");
}

#[test]
fn no_demon_sampling_matches_exact() {
    let sc = SteeringCircuits::device().unwrap();
    let model = NoiseModel::with_device_readout(0.0, 0.0).unwrap();
    let table = outcome_table(&sc.no_demon, Some(&model)).unwrap();
    let mut rng = rng::stream(4, 0);
    for setting in 0..2 {
        let half = &table[setting * 4..setting * 4 + 4];
        let exact = setting_correlator(&table, setting).unwrap();
        let tallies = sample_distribution(half, 2000, &mut rng).unwrap();
        let counts = MeasurementCounts::from_tallies(vec![0, 4], &tallies).unwrap();
        let sampled = correlator(&counts).unwrap();
        let sigma = ((1.0 - exact * exact) / 2000.0).sqrt();
        assert!((sampled - exact).abs() <= 3.0 * sigma, "setting {setting}: {sampled} vs {exact}");
    }
}

#[test]
fn mitigation_beats_raw_counts() {
    let conf = ReadoutConfusion::per_qubit(vec![[0.969, 0.940], [0.946, 0.927]]).unwrap();
    let truth = [0.5, 0.0, 0.0, 0.5];
    let noisy = apply_confusion(&truth, &conf).unwrap();
    let wins = (0..100u64)
        .filter(|&seed| {
            let mut rng = rng::stream(seed, 0);
            let tallies = sample_distribution(&noisy, 2000, &mut rng).unwrap();
            let counts = MeasurementCounts::from_tallies(vec![0, 4], &tallies).unwrap();
            let raw = counts.frequencies().unwrap();
            let fixed = mitigate(&counts, &conf).unwrap();
            total_variation(&fixed, &truth) < total_variation(&raw, &truth)
        })
        .count();
    assert!(wins >= 95, "{wins}/100");
}

#[test]
fn sampled_tomography_recovers_bell_state() {
    let rho = phi_plus().to_density();
    let good = (0..100u64)
        .filter(|&seed| {
            let opts = MeasurementOptions { shots: Some(2000), seed, ..Default::default() };
            tomography(&rho, &opts).unwrap().rho_physical.trace_distance(&rho) <= 0.05
        })
        .count();
    assert!(good >= 95, "{good}/100");
}
