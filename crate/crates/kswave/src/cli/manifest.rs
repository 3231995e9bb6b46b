//! Run directories and their manifests.
//!
//! Every command run gets a directory `<command>-<hash8>` under the output
//! root, where `hash8` prefixes the SHA-256 of the resolved configuration.
//! The directory collects the run's artifacts plus a `manifest.json`
//! recording the command, tool version, wall-clock time, resolved
//! configuration, hashes of any input files, and every output file with its
//! content hash. The manifest also carries `run_hash`, a digest over all of
//! its fields except the timestamp, so reruns of deterministic commands can
//! be compared at a glance: same configuration, same outputs, same
//! `run_hash`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::CliError;

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// One artifact written into a run directory.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    /// File name relative to the run directory.
    pub path: String,
    pub sha256: String,
}

/// Contents of `manifest.json`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Seconds since the epoch at manifest write time. Excluded from
    /// `run_hash` so reruns stay comparable.
    pub unix_time: u64,
    pub csv_schema_version: u32,
    /// Resolved configuration after defaults, config file, and flags.
    pub config: serde_json::Value,
    /// `path -> sha256` of files the run read as inputs.
    pub input_hashes: BTreeMap<String, String>,
    /// Every file written, in write order, excluding the manifest itself.
    pub outputs: Vec<OutputRecord>,
    /// SHA-256 over (command, version, schema, config, inputs, outputs).
    pub run_hash: String,
}

/// CSV schema revision stamped into manifests.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// An open run directory accumulating outputs until [`RunDir::finish`].
pub struct RunDir {
    dir: PathBuf,
    command: String,
    config: serde_json::Value,
    input_hashes: BTreeMap<String, String>,
    outputs: Vec<OutputRecord>,
}

impl RunDir {
    /// Creates (or wipes and recreates) the directory for this command and
    /// configuration. The name depends only on both, so reruns land in the
    /// same place and fully overwrite the previous attempt.
    pub fn create(root: &Path, command: &str, config: &impl Serialize) -> Result<Self, CliError> {
        let config = serde_json::to_value(config)?;
        let key = format!("{command}\n{config}");
        let hash8 = &sha256_hex(key.as_bytes())[..8];
        let dir = root.join(format!("{command}-{hash8}"));
        if dir.exists() {
            std::fs::remove_dir_all(&dir)?;
        }
        std::fs::create_dir_all(&dir)?;
        Ok(RunDir {
            dir,
            command: command.to_string(),
            config,
            input_hashes: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Records input files (path to content hash) for the manifest.
    pub fn note_inputs(&mut self, inputs: &BTreeMap<String, String>) {
        for (k, v) in inputs {
            self.input_hashes.insert(k.clone(), v.clone());
        }
    }

    /// Writes one artifact and records its content hash.
    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
        let bytes = bytes.as_ref();
        std::fs::write(self.dir.join(name), bytes)?;
        self.outputs.push(OutputRecord { path: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    /// Writes `manifest.json` and returns the manifest and the directory.
    pub fn finish(self) -> Result<(RunManifest, PathBuf), CliError> {
        let mut manifest = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            unix_time: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            csv_schema_version: CSV_SCHEMA_VERSION,
            config: self.config,
            input_hashes: self.input_hashes,
            outputs: self.outputs,
            run_hash: String::new(),
        };
        let stable = serde_json::json!({
            "command": manifest.command,
            "version": manifest.version,
            "csv_schema_version": manifest.csv_schema_version,
            "config": manifest.config,
            "input_hashes": manifest.input_hashes,
            "outputs": manifest.outputs.iter().map(|o| (&o.path, &o.sha256)).collect::<Vec<_>>(),
        });
        manifest.run_hash = sha256_hex(stable.to_string().as_bytes());
        let text = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(self.dir.join("manifest.json"), text)?;
        Ok((manifest, self.dir))
    }
}
