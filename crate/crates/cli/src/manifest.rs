//! Run manifests: everything needed to reproduce and audit a run.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub tick: u64,
    /// Relative to the manifest's directory.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub snapshot_version: u32,
    pub stats_format_version: u32,
    pub rng_algorithm: String,
    pub master_seed: u64,
    pub start_tick: u64,
    pub end_tick: u64,
    pub snapshot_interval: u64,
    pub stats_path: String,
    pub lineage_path: String,
    pub snapshots: Vec<SnapshotEntry>,
    /// Full TOML echo of the run's configuration.
    pub config: String,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<(Self, PathBuf)> {
        let file = if path.is_dir() {
            path.join(MANIFEST_FILE)
        } else {
            path.to_path_buf()
        };
        let text = fs::read_to_string(&file).with_context(|| format!("cannot read manifest {}", file.display()))?;
        let manifest: RunManifest =
            serde_json::from_str(&text).with_context(|| format!("malformed manifest {}", file.display()))?;
        if manifest.manifest_version != MANIFEST_VERSION {
            anyhow::bail!(
                "manifest version {} is not supported (expected {MANIFEST_VERSION})",
                manifest.manifest_version
            );
        }
        let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((manifest, dir))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let file = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&file, text + "\n").with_context(|| format!("cannot write {}", file.display()))
    }
}
