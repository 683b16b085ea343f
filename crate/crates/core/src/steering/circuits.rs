use crate::circuit::{Circuit, GateOp};
use crate::error::domain;
use crate::noise::{noisy_execute, NoiseModel, ReadoutConfusion};
use crate::sim::{gates, DensityMatrix, Measure};
use crate::transpiler::{transpile, Compiled, DeviceTopology, QubitMapping};
use crate::Result;
use std::f64::consts::PI;

/// Logical roles in the four-qubit sub-circuits.
pub mod roles {
    pub const BOB: usize = 0;
    pub const GENERATOR: usize = 1;
    pub const MEMORY: usize = 2;
    pub const ALICE: usize = 3;
    /// In the five-qubit circuit the demon's coin sits between memory and Alice.
    pub const COIN: usize = 3;
    pub const ALICE_FIVE: usize = 4;
}

/// Physical placement of `[Bob, generator, memory, Alice]` on the device.
pub const DEVICE_LAYOUT: [usize; 4] = [0, 1, 2, 4];

/// One with-demon run with the coin fixed to `b`.
///
/// The generator's `H` picks the setting `a`, which the memory copies. The
/// demon then rotates Bob and Alice by `R_y((pi/2)(a + 2b))` (for `b = 1` the
/// `pi` part is an unconditional pre-rotation) and the memory-controlled `H`
/// turns the `sigma_X` setting into a computational-basis readout.
pub fn build_demon_branch(b: u8) -> Result<Circuit> {
    use roles::*;
    if b > 1 {
        return Err(domain!("demon coin must be 0 or 1, got {b}"));
    }
    let mut ops = vec![GateOp::h(GENERATOR), GateOp::cnot(GENERATOR, MEMORY)];
    if b == 1 {
        ops.push(GateOp::ry(BOB, PI));
        ops.push(GateOp::ry(ALICE, PI));
    }
    ops.extend([
        GateOp::cry(MEMORY, BOB, PI / 2.0),
        GateOp::cry(MEMORY, ALICE, PI / 2.0),
        GateOp::ch(MEMORY, BOB),
        GateOp::ch(MEMORY, ALICE),
    ]);
    Circuit::from_ops(4, format!("demon-b{b}"), ops)
}

/// Alice answers without the demon: Bob's qubit stays `|0>` and both sides
/// apply the setting-controlled `H` before readout.
pub fn build_no_demon_circuit() -> Circuit {
    use roles::*;
    Circuit::from_ops(
        4,
        "no-demon",
        vec![GateOp::h(GENERATOR), GateOp::ch(GENERATOR, BOB), GateOp::ch(GENERATOR, ALICE)],
    )
    .expect("fixed circuit")
}

/// Five-qubit circuit with a coherent coin on qubit 3 and Alice on qubit 4.
pub fn build_logical_demon_circuit() -> Circuit {
    use roles::{ALICE_FIVE as ALICE, BOB, COIN, GENERATOR, MEMORY};
    Circuit::from_ops(
        5,
        "demon-coherent",
        vec![
            GateOp::h(GENERATOR),
            GateOp::h(COIN),
            GateOp::cnot(GENERATOR, MEMORY),
            GateOp::ccu(COIN, MEMORY, BOB),
            GateOp::ccv(COIN, MEMORY, ALICE),
            GateOp::ch(MEMORY, BOB),
            GateOp::ch(MEMORY, ALICE),
        ],
    )
    .expect("fixed circuit")
}

/// The coherent-coin circuit followed by `H` on the coin, so that reading the
/// coin in the computational basis heralds a Bell pair on Bob and Alice.
pub fn build_bell_herald_circuit() -> Circuit {
    let mut c = build_logical_demon_circuit();
    c.push(GateOp::h(roles::COIN)).expect("coin in range");
    c.label = "demon-bell-herald".into();
    c
}

/// Bob/Alice state heralded by coin outcome `c` of the herald circuit, with the
/// `Z` frame correction applied to Alice for `c = 1`.
///
/// `bob`, `alice` and `coin` are the (physical) qubits of `rho`.
pub fn heralded_pair(rho: &DensityMatrix, bob: usize, alice: usize, coin: usize, outcome: u8) -> Result<DensityMatrix> {
    if outcome > 1 {
        return Err(domain!("coin outcome must be 0 or 1, got {outcome}"));
    }
    let (projected, _) = rho.project(coin, outcome as usize)?;
    let pair = projected.partial_trace(&[bob, alice])?;
    if outcome == 1 {
        pair.apply_unitary(&gates::z(), &[1])
    } else {
        Ok(pair)
    }
}

/// The three sub-circuits compiled for a device.
#[derive(Debug, Clone)]
pub struct SteeringCircuits {
    pub branches: [Compiled; 2],
    pub no_demon: Compiled,
}

/// Outcome distribution of one circuit over `(Bob, Alice, setting)`,
/// index `bob | alice << 1 | setting << 2`.
pub type OutcomeTable = [f64; 8];

impl SteeringCircuits {
    pub fn compile(topo: &DeviceTopology, layout: &QubitMapping) -> Result<Self> {
        let b0 = transpile(&build_demon_branch(0)?, topo, layout)?;
        let b1 = transpile(&build_demon_branch(1)?, topo, layout)?;
        let no_demon = transpile(&build_no_demon_circuit(), topo, layout)?;
        Ok(Self { branches: [b0, b1], no_demon })
    }

    /// Compiled onto the five-qubit grid with the device layout.
    pub fn device() -> Result<Self> {
        Self::compile(&DeviceTopology::grid5(), &QubitMapping::new(DEVICE_LAYOUT.to_vec())?)
    }

    pub fn all(&self) -> [&Compiled; 3] {
        [&self.branches[0], &self.branches[1], &self.no_demon]
    }
}

/// Exact outcome table of a compiled sub-circuit.
///
/// Bob and Alice are read through the model's readout confusion. The setting
/// qubit is Bob's classical choice and is read ideally, except under a joint
/// readout matrix, where it goes through the matrix with the others.
pub fn outcome_table(compiled: &Compiled, noise: Option<&NoiseModel>) -> Result<OutcomeTable> {
    let register = [
        compiled.readout_qubit(roles::BOB),
        compiled.readout_qubit(roles::ALICE),
        compiled.readout_qubit(roles::GENERATOR),
    ];
    let rho = match noise {
        Some(model) => noisy_execute(&compiled.circuit, model)?,
        None => compiled.circuit.simulate_density()?,
    };
    let probs = match noise.map(|m| m.readout()) {
        None => rho.probabilities(&register)?,
        Some(ReadoutConfusion::Joint(_)) => noise.expect("checked").measured_distribution(&rho, &register)?,
        Some(ReadoutConfusion::PerQubit(_)) => {
            let raw = rho.probabilities(&register)?;
            let pair = noise.expect("checked").confusion_for(&register[..2])?;
            let mut out = Vec::with_capacity(8);
            for half in raw.chunks(4) {
                out.extend(crate::noise::apply_confusion(half, &pair)?);
            }
            out
        }
    };
    let mut table = [0.0; 8];
    table.copy_from_slice(&probs);
    Ok(table)
}

/// `P00 + P11 - P01 - P10` for setting `a`, normalised by the setting's weight.
pub fn setting_correlator(table: &OutcomeTable, setting: usize) -> Result<f64> {
    let p = &table[setting * 4..setting * 4 + 4];
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(crate::Error::Numeric(format!("setting {setting} has zero probability")));
    }
    Ok((p[0] + p[3] - p[1] - p[2]) / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::StateVector;

    fn phi_plus() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_amplitudes(vec![crate::sim::c(s, 0.0), 0.0.into(), 0.0.into(), crate::sim::c(s, 0.0)]).unwrap()
    }

    fn logical_table(c: &Circuit) -> OutcomeTable {
        let rho = c.simulate_density().unwrap();
        let p = rho.probabilities(&[roles::BOB, roles::ALICE, roles::GENERATOR]).unwrap();
        let mut t = [0.0; 8];
        t.copy_from_slice(&p);
        t
    }

    #[test]
    fn branches_correlate_perfectly() {
        for b in 0..2 {
            let t = logical_table(&build_demon_branch(b).unwrap());
            for a in 0..2 {
                assert!((setting_correlator(&t, a).unwrap() - 1.0).abs() < 1e-12, "b={b} a={a}");
                assert!((t[a * 4..a * 4 + 4].iter().sum::<f64>() - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_demon_correlators() {
        let t = logical_table(&build_no_demon_circuit());
        assert!((setting_correlator(&t, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(setting_correlator(&t, 1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn branch_mixture_equals_coherent_circuit() {
        let r0 = build_demon_branch(0).unwrap().simulate_density().unwrap();
        let r1 = build_demon_branch(1).unwrap().simulate_density().unwrap();
        let mix = r0.mix(&r1, 0.5).unwrap().partial_trace(&[roles::BOB, roles::ALICE]).unwrap();
        let full = build_logical_demon_circuit().simulate_density().unwrap().partial_trace(&[0, 4]).unwrap();
        assert!(mix.max_abs_diff(&full) < 1e-10);
    }

    #[test]
    fn each_setting_leaves_pair_in_coin_product_state() {
        // After the basis-restoring controlled H the pair is |bb> whatever the setting;
        // the coin is what distinguishes the two Bell components.
        for b in 0..2u8 {
            let rho = build_demon_branch(b).unwrap().simulate_density().unwrap();
            for a in 0..2 {
                let (proj, _) = rho.project(roles::MEMORY, a).unwrap();
                let pair = proj.partial_trace(&[roles::BOB, roles::ALICE]).unwrap();
                let zz = pair.probabilities(&[0, 1]).unwrap();
                assert!((zz[(b as usize) * 3] - 1.0).abs() < 1e-12, "b={b} a={a}");
            }
        }
    }

    #[test]
    fn herald_yields_phi_plus() {
        let rho = build_bell_herald_circuit().simulate_density().unwrap();
        for c in 0..2 {
            let pair = heralded_pair(&rho, 0, 4, roles::COIN, c).unwrap();
            assert!(pair.fidelity(&phi_plus()).unwrap() > 1.0 - 1e-10);
        }
    }

    #[test]
    fn device_compile_needs_swaps_and_is_equivalent() {
        let sc = SteeringCircuits::device().unwrap();
        for (k, c) in sc.branches.iter().enumerate() {
            assert!(c.report.swaps >= 1, "branch {k}");
            assert!(c.report.equivalence.as_ref().unwrap().max_deviation <= 1e-9);
        }
        let topo = DeviceTopology::grid5();
        for c in sc.all() {
            for op in c.circuit.ops().iter().filter(|op| op.arity() == 2) {
                assert!(topo.is_edge(op.qubits[0], op.qubits[1]));
            }
        }
    }

    #[test]
    fn compiled_tables_match_logical() {
        let sc = SteeringCircuits::device().unwrap();
        let logical = [build_demon_branch(0).unwrap(), build_demon_branch(1).unwrap(), build_no_demon_circuit()];
        for (c, l) in sc.all().iter().zip(&logical) {
            let a = outcome_table(c, None).unwrap();
            let b = logical_table(l);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn readout_lowers_no_demon_z_correlator() {
        let sc = SteeringCircuits::device().unwrap();
        let model = NoiseModel::with_device_readout(0.0, 0.0).unwrap();
        let t = outcome_table(&sc.no_demon, Some(&model)).unwrap();
        assert!(setting_correlator(&t, 0).unwrap() < 1.0 - 1e-3);
    }
}
