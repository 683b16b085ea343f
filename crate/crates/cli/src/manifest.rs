use crate::error::{io_err, CliError, CliResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

/// Record of one command run: enough to re-run it and check the payloads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub version: String,
    pub out_dir: PathBuf,
    pub outputs: Vec<OutputRecord>,
    pub wall_clock_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects payload files of a run in its output directory.
pub struct OutputSink {
    dir: PathBuf,
    records: Vec<OutputRecord>,
    started: Instant,
}

impl OutputSink {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), records: Vec::new(), started: Instant::now() })
    }

    pub fn write(&mut self, file: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.dir.join(file);
        std::fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.records.push(OutputRecord { file: file.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(path)
    }

    pub fn finish<C: Serialize>(&self, command: &str, config: &C, seed: u64) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config).map_err(|e| CliError::Io(e.to_string()))?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            out_dir: self.dir.clone(),
            outputs: self.records.clone(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let path = self.dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
        Ok(manifest)
    }
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Core(demonsteer::Error::Validation(format!(
            "{} line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )))
    })
}
