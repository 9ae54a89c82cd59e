//! Run manifests: a JSON record of what produced the artifacts in an output
//! directory (command, config digest, parameters, outputs, timing, version).

use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::qio::{read_json, write_json};
use crate::qtensor::ModelParams;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand that produced this directory.
    pub command: String,
    /// SHA-256 digest of the canonicalized config.
    pub config_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ModelParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Paths relative to the output directory; all must exist on success.
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, config_digest: &str) -> Self {
        Self {
            command: command.to_string(),
            config_digest: config_digest.to_string(),
            params: None,
            grid: None,
            outputs: Vec::new(),
            wall_clock_seconds: 0.0,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn record_output(&mut self, rel_path: &str) {
        self.outputs.push(rel_path.to_string());
    }

    /// Verify every recorded output exists, then write `manifest.json`.
    pub fn write(&self, out_dir: &Path) -> Result<()> {
        for rel in &self.outputs {
            let p = out_dir.join(rel);
            if !p.exists() {
                return Err(Error::Invalid(format!(
                    "manifest lists output '{rel}' but it was not written"
                )));
            }
        }
        write_json(&out_dir.join(MANIFEST_FILE), self)
    }

    pub fn read(out_dir: &Path) -> Result<Self> {
        read_json(&out_dir.join(MANIFEST_FILE))
    }
}
