use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Config field (`inputs.weather`) or output file name.
    pub name: String,
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

/// Provenance record of one subcommand run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    pub target: Option<String>,
    pub config: Option<FileDigest>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Inputs whose content changed since the training run.
    pub drift: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(name: &str, path: &Path) -> CliResult<FileDigest> {
    let data = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(FileDigest { name: name.to_string(), path: path.to_path_buf(), bytes: data.len() as u64, sha256: sha256_hex(&data) })
}

pub fn manifest_path(dir: &Path, subcommand: &str) -> PathBuf {
    dir.join(format!("manifest-{subcommand}.json"))
}

impl Manifest {
    pub fn new(subcommand: &str, cfg: Option<&RunConfig>, seed: u64) -> CliResult<Self> {
        let mut inputs = Vec::new();
        let mut config = None;
        if let Some(cfg) = cfg {
            for (field, path) in cfg.inputs.entries() {
                if let Some(p) = path {
                    inputs.push(digest_file(&format!("inputs.{field}"), p)?);
                }
            }
            config = cfg.config_path.as_deref().map(|p| digest_file("config", p)).transpose()?;
        }
        Ok(Self {
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            target: cfg.map(|c| c.target.to_string()),
            config,
            inputs,
            outputs: Vec::new(),
            drift: Vec::new(),
        })
    }

    pub fn add_input(&mut self, name: &str, path: &Path) -> CliResult<()> {
        self.inputs.push(digest_file(name, path)?);
        Ok(())
    }

    /// Records drift against the inputs of an earlier manifest.
    pub fn compare_with(&mut self, earlier: &Manifest) {
        for old in &earlier.inputs {
            if let Some(new) = self.inputs.iter().find(|d| d.name == old.name) {
                if new.sha256 != old.sha256 {
                    warn!("{} changed since {} ({} -> {})", old.name, earlier.subcommand, old.sha256, new.sha256);
                    self.drift.push(old.name.clone());
                }
            }
        }
    }

    /// Hashes `outputs` (names relative to `dir`) and writes the manifest.
    pub fn finish(mut self, dir: &Path, outputs: &[&str]) -> CliResult<PathBuf> {
        for name in outputs {
            self.outputs.push(digest_file(name, &dir.join(name))?);
        }
        let path = manifest_path(dir, &self.subcommand);
        let text = zigcast_core::io::to_json_string(&self)?;
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        Ok(zigcast_core::io::read_json(path)?)
    }
}
