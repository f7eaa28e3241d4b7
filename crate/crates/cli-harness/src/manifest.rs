//! Run manifests: written before a long run starts, finalized on completion.
//!
//! A manifest captures the subcommand, the fully resolved configuration, the
//! master seed, and the code version; rerunning from a manifest reproduces
//! the run's CSV outputs byte-for-byte (only timestamps and the run directory
//! name differ). Interrupted runs are recognizable by `status: incomplete`.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Environment variable overriding the default output base directory.
pub const OUT_DIR_ENV: &str = "BANDITLAB_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Incomplete,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Fully resolved command configuration (defaults applied).
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub code_version: String,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub status: RunStatus,
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Base directory for runs: $BANDITLAB_OUT or ./runs.
pub fn default_out_base() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// Create a fresh per-run directory named by timestamp and seed.
pub fn create_run_dir(base: &Path, subcommand: &str, seed: u64) -> io::Result<PathBuf> {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos())
        .unwrap_or(0);
    let mut dir = base.join(format!("{subcommand}-{nanos}-seed{seed}"));
    let mut bump = 0u32;
    while dir.exists() {
        bump += 1;
        dir = base.join(format!("{subcommand}-{nanos}-seed{seed}-{bump}"));
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

impl RunManifest {
    /// Write the incomplete manifest into `run_dir` before doing any work.
    pub fn begin<C: Serialize>(
        subcommand: &str,
        config: &C,
        master_seed: u64,
        run_dir: &Path,
    ) -> io::Result<Self> {
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            master_seed,
            output_dir: run_dir.to_path_buf(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: now_unix(),
            finished_unix: None,
            status: RunStatus::Incomplete,
        };
        manifest.write(run_dir)?;
        Ok(manifest)
    }

    /// Mark complete and rewrite.
    pub fn finalize(&mut self, run_dir: &Path) -> io::Result<()> {
        self.finished_unix = Some(now_unix());
        self.status = RunStatus::Complete;
        self.write(run_dir)
    }

    pub fn write(&self, run_dir: &Path) -> io::Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(run_dir.join(MANIFEST_FILE), json)
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    /// Deserialize the echoed config back into a command config type.
    pub fn config_as<C: for<'de> Deserialize<'de>>(&self) -> io::Result<C> {
        serde_json::from_value(self.config.clone())
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}
