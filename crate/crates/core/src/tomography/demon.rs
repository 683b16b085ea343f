use crate::error::domain;
use crate::noise::{noisy_execute, NoiseModel, ReadoutConfusion};
use crate::sim::DensityMatrix;
use crate::steering::{build_bell_herald_circuit, heralded_pair, roles};
use crate::transpiler::{transpile, Compiled, DeviceTopology, QubitMapping};
use crate::Result;

/// Bob/Alice states heralded by the two coin outcomes of the compiled
/// herald circuit, together with the compile used.
#[derive(Debug, Clone)]
pub struct HeraldedPairs {
    pub compiled: Compiled,
    pub states: [DensityMatrix; 2],
    /// Physical `(Bob, Alice)` readout qubits.
    pub readout_qubits: [usize; 2],
}

/// Runs the herald circuit (compiled all-to-all on five qubits, identity
/// layout, so Bob and Alice sit on physical qubits 0 and 4) and returns the
/// heralded pair for each coin outcome.
pub fn heralded_bell_states(noise: Option<&NoiseModel>) -> Result<HeraldedPairs> {
    let circuit = build_bell_herald_circuit();
    let compiled = transpile(&circuit, &DeviceTopology::complete(5), &QubitMapping::identity(5))?;
    let rho = match noise {
        Some(m) => noisy_execute(&compiled.circuit, m)?,
        None => compiled.circuit.simulate_density()?,
    };
    let bob = compiled.readout_qubit(roles::BOB);
    let alice = compiled.readout_qubit(roles::ALICE_FIVE);
    let coin = compiled.readout_qubit(roles::COIN);
    let states = [heralded_pair(&rho, bob, alice, coin, 0)?, heralded_pair(&rho, bob, alice, coin, 1)?];
    Ok(HeraldedPairs { compiled, states, readout_qubits: [bob, alice] })
}

/// Readout confusion of the physical `(Bob, Alice)` pair.
///
/// A joint matrix is reduced to the pair by averaging over the prepared
/// states of the other covered qubits and marginalising their outcomes.
pub fn demon_pair_readout(model: &NoiseModel, pair: [usize; 2]) -> Result<ReadoutConfusion> {
    match model.readout() {
        ReadoutConfusion::PerQubit(_) => model.confusion_for(&pair),
        ReadoutConfusion::Joint(m) => {
            let qs = model.readout_qubits();
            let pos = |q: usize| {
                qs.iter().position(|&r| r == q).ok_or_else(|| domain!("qubit {q} not covered by the joint readout"))
            };
            let (p0, p1) = (pos(pair[0])?, pos(pair[1])?);
            let local = |i: usize| ((i >> p0) & 1) | (((i >> p1) & 1) << 1);
            let mut reduced = nalgebra::DMatrix::<f64>::zeros(4, 4);
            let others = (m.nrows() / 4) as f64;
            for t in 0..m.nrows() {
                for r in 0..m.ncols() {
                    reduced[(local(t), local(r))] += m[(t, r)] / others;
                }
            }
            ReadoutConfusion::joint(reduced)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::bell_fidelity;

    #[test]
    fn noiseless_pairs_are_bell_states() {
        let h = heralded_bell_states(None).unwrap();
        assert_eq!(h.readout_qubits, [0, 4]);
        assert_eq!(h.compiled.report.swaps, 0);
        for s in &h.states {
            assert!(bell_fidelity(s).unwrap() >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn fidelity_decreases_with_noise() {
        let f: Vec<f64> = [0.001, 0.005, 0.02]
            .iter()
            .map(|&l| {
                let m = NoiseModel::gates_only(l, l).unwrap();
                let h = heralded_bell_states(Some(&m)).unwrap();
                bell_fidelity(&h.states[0]).unwrap()
            })
            .collect();
        assert!(f[0] < 1.0 && f[1] < f[0] && f[2] < f[1], "{f:?}");
    }

    #[test]
    fn joint_reduction_matches_product() {
        let m = NoiseModel::with_device_readout(0.0, 0.0).unwrap();
        let per = demon_pair_readout(&m, [0, 4]).unwrap();
        let joint = NoiseModel::with_readout_qubits(
            0.0,
            0.0,
            ReadoutConfusion::joint(m.confusion_for(&[0, 1, 2, 4]).unwrap().matrix()).unwrap(),
            vec![0, 1, 2, 4],
        )
        .unwrap();
        let red = demon_pair_readout(&joint, [0, 4]).unwrap();
        assert!((per.matrix() - red.matrix()).abs().max() < 1e-12);
    }
}
