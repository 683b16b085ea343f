use super::{load_noise, report_json, Common};
use crate::error::{CliError, CliResult};
use crate::manifest::OutputSink;
use clap::Args;
use demonsteer::tomography::{bell_fidelity, demon_pair_readout, heralded_bell_states, tomography, MeasurementOptions, TomographyReport};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TomoArgs {
    /// Heralded branch: b0 or b1.
    #[arg(long, default_value = "b0")]
    pub branch: String,
    /// Shots per measurement setting.
    #[arg(long, default_value_t = 2000)]
    pub shots: u64,
    /// Use exact (infinite-shot) expectations.
    #[arg(long)]
    pub exact: bool,
    /// Noise config JSON.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Keep readout errors in the reconstruction instead of inverting them.
    #[arg(long)]
    pub no_mitigate: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct TomoOutput {
    branch: String,
    shots: Option<u64>,
    mitigated: bool,
    true_bell_fidelity: f64,
    #[serde(flatten)]
    tomography: TomographyReport,
}

pub fn run(args: &TomoArgs) -> CliResult<()> {
    let outcome = match args.branch.as_str() {
        "b0" => 0,
        "b1" => 1,
        other => return Err(CliError::Usage(format!("--branch must be b0 or b1, got {other:?}"))),
    };
    if !args.exact && args.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let noise = load_noise(args.noise.as_deref())?;
    let pairs = heralded_bell_states(noise.as_ref())?;
    let state = &pairs.states[outcome];
    let readout = match &noise {
        Some(m) if !m.readout_qubits().is_empty() => Some(demon_pair_readout(m, pairs.readout_qubits)?),
        _ => None,
    };
    let mitigate = readout.is_some() && !args.no_mitigate;
    let opts = MeasurementOptions { shots: (!args.exact).then_some(args.shots), seed: args.common.seed, readout, mitigate };
    let result = args.common.in_pool(|| Ok(tomography(state, &opts)?))?;

    let output = TomoOutput {
        branch: args.branch.clone(),
        shots: opts.shots,
        mitigated: mitigate,
        true_bell_fidelity: bell_fidelity(state)?,
        tomography: result.report(),
    };
    let mut sink = OutputSink::new(&args.common.out)?;
    sink.write("tomography.json", &report_json(&output))?;
    sink.finish("tomo", args, args.common.seed)?;
    println!("branch {}: reconstructed Bell fidelity {:.4} (state {:.4})", args.branch, result.bell_fidelity, output.true_bell_fidelity);
    Ok(())
}
