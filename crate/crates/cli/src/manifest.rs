//! Run manifests: every subcommand records what went in and what came out.
//!
//! Manifests deliberately carry no timestamps so that identical inputs yield
//! byte-identical manifests.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// SHA-256 of every input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Manifest {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Manifest {
        self.seed = Some(seed);
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let body = std::fs::read(path).with_context(|| format!("reading input {}", path.display()))?;
        let digest = Sha256::digest(&body);
        self.inputs.insert(path.display().to_string(), format!("{digest:x}"));
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
        self.outputs.sort();
    }

    /// Writes `<out>/<command>.manifest.json`.
    pub fn write(&self, out_dir: &Path) -> Result<()> {
        let path = out_dir.join(format!("{}.manifest.json", self.command));
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
