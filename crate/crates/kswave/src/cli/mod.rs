//! Command-line front end: configuration, run directories, and the seven
//! subcommands exposed by the `kswave` binary.
//!
//! Every command resolves its configuration the same way: defaults, then an
//! optional JSON config file, then individual flags, with later layers
//! winning field by field. Each run writes its artifacts into a directory
//! named `<command>-<hash8>` under the output root (`--out`, else the
//! `KSWAVE_OUT` environment variable, else `runs/`), where `hash8` is a
//! prefix of the SHA-256 of the resolved configuration. Rerunning the same
//! command with the same configuration overwrites the same directory, so
//! deterministic commands reproduce their manifests byte for byte.
//!
//! Process exit codes follow a fixed convention:
//!
//! * 0: success
//! * 2: configuration error (bad flags, inadmissible parameters, bad files)
//! * 3: a certification check failed (a region face leaks, a surface
//!   condition does not hold)
//! * 4: numerical failure (bisection bracket invalid, integrator breakdown,
//!   non-finite state) and any i/o failure while writing artifacts

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;
pub mod sweep;

pub use commands::{
    cmd_minspeed, cmd_shoot, cmd_simulate, cmd_speed, cmd_surface, cmd_trapcheck, CommandReport,
};
pub use config::{parse_chi_spec, parse_eta_spec, EtaSpec, FileConfig};
pub use manifest::{sha256_hex, RunDir, RunManifest};
pub use sweep::{cmd_sweep, SweepSpec};

use thiserror::Error;

/// Failure modes a command can report, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The request itself is malformed: unparseable flags or files,
    /// inadmissible model parameters, impossible grid sizes.
    #[error("configuration error: {0}")]
    Config(String),

    /// The computation ran but the property being certified does not hold.
    #[error("certification failed: {0}")]
    Certification(String),

    /// The computation could not be completed: invalid bracket, integrator
    /// breakdown, or non-finite state.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An artifact could not be written.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Certification(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<crate::model::ModelError> for CliError {
    fn from(e: crate::model::ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<crate::heteroclinic::HeteroError> for CliError {
    fn from(e: crate::heteroclinic::HeteroError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<crate::pde::PdeError> for CliError {
    fn from(e: crate::pde::PdeError) -> Self {
        match e {
            crate::pde::PdeError::GridTooCoarse { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("bad JSON: {e}"))
    }
}
