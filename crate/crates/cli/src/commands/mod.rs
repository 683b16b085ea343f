pub mod compile;
pub mod fit;
pub mod rb;
pub mod replay;
pub mod steer;
pub mod tomo;

use crate::error::{io_err, CliError, CliResult};
use clap::Args;
use demonsteer::noise::NoiseModel;
use demonsteer::transpiler::DeviceTopology;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Common {
    /// Master seed for every random stream.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: number of processors).
    #[arg(long)]
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Common {
    /// Runs `f` inside a worker pool of the requested size.
    pub fn in_pool<T: Send>(&self, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            if n == 0 {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Io(format!("worker pool: {e}")))?;
        pool.install(f)
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

pub fn load_noise(path: Option<&Path>) -> CliResult<Option<NoiseModel>> {
    path.map(|p| Ok(NoiseModel::from_json(&read_text(p)?)?)).transpose()
}

/// A preset name (`grid5`, `complete<n>`, `line<n>`) or a coupling-map file.
pub fn load_topology(spec: &str) -> CliResult<DeviceTopology> {
    let path = Path::new(spec);
    if path.exists() {
        return Ok(DeviceTopology::from_json(&read_text(path)?)?);
    }
    Ok(DeviceTopology::preset(spec)?)
}

pub fn report_json<T: Serialize>(value: &T) -> String {
    demonsteer::format::to_report_json(value)
}
