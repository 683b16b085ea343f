//! WebAssembly bindings behind the static page in `www/`.
//!
//! Each exported function returns a JSON string; the `*_json` functions hold
//! the logic so they can be tested without a JavaScript host.

use demonsteer::noise::NoiseModel;
use demonsteer::steering::{self, SteeringCircuits, SteeringExperiment, SweepRow, CLASSICAL_BOUND};
use demonsteer::tomography::{bell_fidelity, heralded_bell_states, tomography, MeasurementOptions, TomographyReport};
use demonsteer::transpiler::{transpile, CompileReport, DeviceTopology, QubitMapping};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn noise(lambda_1q: f64, lambda_2q: f64) -> Result<Option<NoiseModel>, String> {
    if lambda_1q == 0.0 && lambda_2q == 0.0 {
        return Ok(None);
    }
    NoiseModel::gates_only(lambda_1q, lambda_2q).map(Some).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Sweep {
    classical_bound: f64,
    rows: Vec<SweepRow>,
}

/// Exact and sampled `S2` on `points` evenly spaced values of `p` in `[0, 1]`.
pub fn sweep_json(lambda_1q: f64, lambda_2q: f64, points: u32, groups: u32, shots: u32, seed: u32) -> Result<String, String> {
    if !(2..=101).contains(&points) {
        return Err(format!("points must be in 2..=101, got {points}"));
    }
    let grid: Vec<f64> = (0..points).map(|k| k as f64 / (points - 1) as f64).collect();
    let model = noise(lambda_1q, lambda_2q)?;
    let circuits = SteeringCircuits::device().map_err(|e| e.to_string())?;
    let exp = SteeringExperiment::new(&circuits, model.as_ref()).map_err(|e| e.to_string())?;
    let rows = exp.sweep(&grid, groups as usize, shots as u64, seed as u64).map_err(|e| e.to_string())?;
    to_json(&Sweep { classical_bound: CLASSICAL_BOUND, rows })
}

#[derive(Serialize)]
struct Tomography {
    branch: u8,
    true_bell_fidelity: f64,
    #[serde(flatten)]
    report: TomographyReport,
}

/// Pauli tomography of the heralded pair for coin outcome `branch`.
/// `shots == 0` uses exact expectations.
pub fn tomography_json(branch: u8, lambda_1q: f64, lambda_2q: f64, shots: u32, seed: u32) -> Result<String, String> {
    if branch > 1 {
        return Err(format!("branch must be 0 or 1, got {branch}"));
    }
    let model = noise(lambda_1q, lambda_2q)?;
    let pairs = heralded_bell_states(model.as_ref()).map_err(|e| e.to_string())?;
    let state = &pairs.states[branch as usize];
    let opts = MeasurementOptions { shots: (shots > 0).then_some(shots as u64), seed: seed as u64, ..Default::default() };
    let result = tomography(state, &opts).map_err(|e| e.to_string())?;
    to_json(&Tomography {
        branch,
        true_bell_fidelity: bell_fidelity(state).map_err(|e| e.to_string())?,
        report: result.report(),
    })
}

#[derive(Serialize)]
struct CompileView {
    logical: Vec<String>,
    compiled: Vec<String>,
    edges: Vec<(usize, usize)>,
    initial_layout: Vec<usize>,
    final_layout: Vec<usize>,
    report: CompileReport,
}

/// Compiles one of the experiment circuits onto the five-qubit grid.
pub fn compile_json(name: &str) -> Result<String, String> {
    let circuit = match name {
        "demon-b0" => steering::build_demon_branch(0).map_err(|e| e.to_string())?,
        "demon-b1" => steering::build_demon_branch(1).map_err(|e| e.to_string())?,
        "no-demon" => steering::build_no_demon_circuit(),
        other => return Err(format!("unknown circuit {other:?}")),
    };
    let topo = DeviceTopology::grid5();
    let layout = QubitMapping::new(steering::DEVICE_LAYOUT.to_vec()).map_err(|e| e.to_string())?;
    let compiled = transpile(&circuit, &topo, &layout).map_err(|e| e.to_string())?;
    to_json(&CompileView {
        logical: circuit.ops().iter().map(ToString::to_string).collect(),
        compiled: compiled.circuit.ops().iter().map(ToString::to_string).collect(),
        edges: topo.edges().collect(),
        initial_layout: compiled.initial.as_slice().to_vec(),
        final_layout: compiled.final_mapping.as_slice().to_vec(),
        report: compiled.report,
    })
}

#[wasm_bindgen]
pub fn steering_sweep(lambda_1q: f64, lambda_2q: f64, points: u32, groups: u32, shots: u32, seed: u32) -> Result<String, JsValue> {
    sweep_json(lambda_1q, lambda_2q, points, groups, shots, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bell_tomography(branch: u8, lambda_1q: f64, lambda_2q: f64, shots: u32, seed: u32) -> Result<String, JsValue> {
    tomography_json(branch, lambda_1q, lambda_2q, shots, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compile_view(name: &str) -> Result<String, JsValue> {
    compile_json(name).map_err(|e| JsValue::from_str(&e))
}
