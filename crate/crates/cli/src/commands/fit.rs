use super::{load_topology, report_json, Common};
use crate::error::{CliError, CliResult};
use crate::manifest::OutputSink;
use clap::{Args, ValueEnum};
use demonsteer::noise::{calibration, fit_lambda2, NoiseModel};
use demonsteer::steering::{SteeringCircuits, DEVICE_LAYOUT};
use demonsteer::transpiler::{QubitMapping, GRID5_PRESET};
use serde::{Deserialize, Serialize};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReadoutChoice {
    /// Readout treated as calibrated away.
    None,
    /// Per-qubit readout fidelities of the device.
    Device,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FitArgs {
    /// Target S2 at p = 1.
    #[arg(long, default_value_t = 0.770)]
    pub target: f64,
    /// Fixed single-qubit depolarizing rate (default from 99.9% gate fidelity).
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Readout model during the fit and in the written file.
    #[arg(long, value_enum, default_value_t = ReadoutChoice::None)]
    pub readout: ReadoutChoice,
    /// Coupling preset or coupling-map file.
    #[arg(long, default_value = GRID5_PRESET)]
    pub coupling: String,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(args: &FitArgs) -> CliResult<()> {
    if !(args.target > 0.5 && args.target <= 1.0) {
        return Err(CliError::Usage(format!("--target must lie in (0.5, 1], got {}", args.target)));
    }
    let lambda1 = args.lambda1.unwrap_or_else(|| calibration::depolarizing_from_fidelity(calibration::ONE_QUBIT_FIDELITY, 1));
    let base = match args.readout {
        ReadoutChoice::None => NoiseModel::gates_only(lambda1, 0.0)?,
        ReadoutChoice::Device => NoiseModel::with_device_readout(lambda1, 0.0)?,
    };
    let circuits = SteeringCircuits::compile(&load_topology(&args.coupling)?, &QubitMapping::new(DEVICE_LAYOUT.to_vec())?)?;
    let fit = args.common.in_pool(|| Ok(fit_lambda2(args.target, &base, &circuits)?))?;
    let model = fit.model(&base)?;

    let mut doc: serde_json::Value = serde_json::from_str(&model.to_json()).expect("noise json");
    doc["fit"] = serde_json::to_value(&fit).expect("fit serializes");
    let mut sink = OutputSink::new(&args.common.out)?;
    sink.write("noise.json", &report_json(&doc))?;
    sink.finish("fit-noise", args, args.common.seed)?;
    println!(
        "lambda_2q = {:.6e}  achieved S2(1) = {:.8}  ({} bisection steps)",
        fit.lambda_2q,
        fit.achieved_s2,
        fit.trace.len()
    );
    Ok(())
}
