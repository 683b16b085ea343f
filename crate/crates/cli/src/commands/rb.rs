use super::{load_noise, report_json, Common};
use crate::error::{CliError, CliResult};
use crate::manifest::OutputSink;
use clap::Args;
use demonsteer::format::format_sig;
use demonsteer::noise::{calibration, fit_decay, fit_interleaved, interleaved_survival, rb_survival, NoiseModel};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RbArgs {
    /// Sequence lengths (strictly increasing).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 10, 25, 50, 100, 200, 400])]
    pub lengths: Vec<usize>,
    /// Random sequences per length.
    #[arg(long, default_value_t = 20)]
    pub sequences: usize,
    /// Noise config JSON (default: depolarizing rates for 99.9% one-qubit and 99.1% CZ fidelity).
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Two-qubit reference plus CZ-interleaved benchmarking.
    #[arg(long)]
    pub two_qubit: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(args: &RbArgs) -> CliResult<()> {
    if args.lengths.is_empty() || args.lengths[0] == 0 || args.lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(format!("--lengths must be positive and strictly increasing, got {:?}", args.lengths)));
    }
    if args.sequences == 0 {
        return Err(CliError::Usage("--sequences must be at least 1".into()));
    }
    let model = match load_noise(args.noise.as_deref())? {
        Some(m) => m,
        None => NoiseModel::gates_only(
            calibration::depolarizing_from_fidelity(calibration::ONE_QUBIT_FIDELITY, 1),
            calibration::depolarizing_from_fidelity(calibration::CZ_FIDELITY, 2),
        )?,
    };
    let seed = args.common.seed;
    let mut sink = OutputSink::new(&args.common.out)?;

    if args.two_qubit {
        let (reference, interleaved) =
            args.common.in_pool(|| Ok(interleaved_survival(&args.lengths, &model, args.sequences, seed)?))?;
        let mut csv = String::from("length,reference_survival,interleaved_survival\n");
        for ((m, r), i) in args.lengths.iter().zip(&reference).zip(&interleaved) {
            csv.push_str(&format!("{m},{},{}\n", format_sig(*r), format_sig(*i)));
        }
        sink.write("rb.csv", &csv)?;
        let fitted = fit_interleaved(&args.lengths, &reference, &interleaved);
        let fitted = finish_fit(fitted, &mut sink, args, seed)?;
        println!("CZ error per gate {:.6e}  fidelity {:.6}", fitted.cz_error, fitted.cz_fidelity);
    } else {
        let survival = args.common.in_pool(|| Ok(rb_survival(&args.lengths, &model, args.sequences, seed)?))?;
        let mut csv = String::from("length,survival\n");
        for (m, s) in args.lengths.iter().zip(&survival) {
            csv.push_str(&format!("{m},{}\n", format_sig(*s)));
        }
        sink.write("rb.csv", &csv)?;
        let fitted = finish_fit(fit_decay(&args.lengths, &survival, 2), &mut sink, args, seed)?;
        println!(
            "alpha {:.8}  error per gate {:.6e}  fidelity {:.6}",
            fitted.alpha,
            fitted.error_per_gate,
            1.0 - fitted.error_per_gate
        );
    }
    Ok(())
}

/// Writes the fit when it converged; the raw curve and manifest are written either way.
fn finish_fit<T: Serialize>(
    fitted: demonsteer::Result<T>,
    sink: &mut OutputSink,
    args: &RbArgs,
    seed: u64,
) -> CliResult<T> {
    if let Ok(f) = &fitted {
        sink.write("rb_fit.json", &report_json(f))?;
    }
    sink.finish("rb", args, seed)?;
    Ok(fitted?)
}
