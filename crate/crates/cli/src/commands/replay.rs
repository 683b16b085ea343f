use crate::error::{CliError, CliResult};
use crate::manifest::{read_manifest, sha256_hex};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory for the replayed outputs (default: `replay` next to the manifest).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the replay.
    #[arg(long)]
    pub workers: Option<usize>,
}

fn config<T: DeserializeOwned>(value: &serde_json::Value) -> CliResult<T> {
    serde_json::from_value(value.clone())
        .map_err(|e| CliError::Core(demonsteer::Error::Validation(format!("manifest config: {e}"))))
}

pub fn run(args: &ReplayArgs) -> CliResult<()> {
    let manifest = read_manifest(&args.manifest)?;
    let out = args.out.clone().unwrap_or_else(|| {
        args.manifest.parent().unwrap_or_else(|| Path::new(".")).join("replay")
    });
    let workers = args.workers;
    macro_rules! rerun {
        ($ty:ty, $run:path) => {{
            let mut a: $ty = config(&manifest.config)?;
            a.common.out = out.clone();
            a.common.workers = workers;
            $run(&a)?
        }};
    }
    match manifest.command.as_str() {
        "compile" => rerun!(super::compile::CompileArgs, super::compile::run),
        "steer" => rerun!(super::steer::SteerArgs, super::steer::run),
        "tomo" => rerun!(super::tomo::TomoArgs, super::tomo::run),
        "fit-noise" => rerun!(super::fit::FitArgs, super::fit::run),
        "rb" => rerun!(super::rb::RbArgs, super::rb::run),
        other => return Err(CliError::Usage(format!("manifest names unknown command {other:?}"))),
    }

    let mut mismatches = Vec::new();
    for rec in &manifest.outputs {
        let path = out.join(&rec.file);
        let bytes = std::fs::read(&path).map_err(|e| crate::error::io_err(&path, e))?;
        if sha256_hex(&bytes) != rec.sha256 {
            mismatches.push(rec.file.clone());
        }
    }
    if mismatches.is_empty() {
        println!("replay reproduced {} payload(s) byte for byte", manifest.outputs.len());
        Ok(())
    } else {
        Err(CliError::Mismatch(format!("payloads differ: {}", mismatches.join(", "))))
    }
}
