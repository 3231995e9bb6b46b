//! Configuration layering and the small textual grammars used on the
//! command line.
//!
//! A command's configuration is assembled in three layers: built-in
//! defaults, then an optional JSON config file, then individual flags.
//! Later layers win field by field. [`FileConfig`] is the shared key set;
//! every field is optional so that absent keys fall through to the layer
//! below.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{ChiFunction, ModelParams};

use super::manifest::sha256_hex;
use super::CliError;

/// One layer of configuration. All fields optional; `merge` stacks layers.
///
/// The same key set serves every subcommand; commands read the fields they
/// care about and ignore the rest. Serialized form uses `D` for the
/// diffusivity to match the model's own naming.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub mu: Option<f64>,
    pub beta: Option<f64>,
    #[serde(rename = "D")]
    pub diff: Option<f64>,
    /// Sensitivity spec: `const:<k>`, `affine:<a>,<b>`, or `table:<path>`.
    pub chi: Option<String>,
    /// Wave speed for single-speed commands.
    pub c: Option<f64>,
    /// Bisection tolerance for empirical speed searches.
    pub tol: Option<f64>,
    /// Sample count for face certification.
    pub samples: Option<usize>,
    /// Surface slope spec: `half`, `five-eighths`, or a number.
    pub eta: Option<String>,
    /// Random seed for sampled checks.
    pub seed: Option<u64>,
    /// Domain length for simulations.
    pub length: Option<f64>,
    /// Cell count for simulations.
    pub cells: Option<usize>,
    /// Simulation horizon.
    pub t_end: Option<f64>,
    /// Solve in the frame moving at `c` instead of the lab frame.
    pub comoving: Option<bool>,
    /// Initial front location for lab-frame simulations.
    pub front_x: Option<f64>,
    /// Output root; overrides `KSWAVE_OUT` and the `runs/` default.
    pub out: Option<PathBuf>,
}

impl FileConfig {
    /// Loads a JSON layer from disk.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }

    /// Returns `self` overridden by every field present in `over`.
    pub fn merge(mut self, over: FileConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(mu, beta, diff, chi, c, tol, samples, eta, seed, length, cells, t_end, comoving,
            front_x, out);
        self
    }

    /// Validated model parameters plus the canonical sensitivity id and the
    /// hashes of any files the sensitivity spec pulled in.
    pub fn resolve_model(&self) -> Result<ResolvedModel, CliError> {
        let chi_id = self.chi.clone().unwrap_or_else(|| "const:0".into());
        let (chi, inputs) = parse_chi_spec(&chi_id)?;
        let params = ModelParams::new(
            self.mu.unwrap_or(1.0),
            self.beta.unwrap_or(1.0),
            self.diff.unwrap_or(0.0),
            chi,
        )?;
        Ok(ResolvedModel { params, chi_id, inputs })
    }

    /// Output root: explicit field, else `KSWAVE_OUT`, else `runs`.
    pub fn out_root(&self) -> PathBuf {
        if let Some(p) = &self.out {
            return p.clone();
        }
        match std::env::var_os("KSWAVE_OUT") {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => PathBuf::from("runs"),
        }
    }
}

/// Model parameters together with provenance of the sensitivity spec.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub params: ModelParams,
    /// The spec string exactly as configured; used as the row id in sweeps.
    pub chi_id: String,
    /// `path -> sha256` for files read while parsing the spec.
    pub inputs: BTreeMap<String, String>,
}

/// Parses a sensitivity spec.
///
/// Grammar: `const:<k>` for a constant, `affine:<a>,<b>` for `a + b v`,
/// `table:<path>` for piecewise-linear nodes loaded from a JSON array of
/// `[v, value]` pairs. Returns the function and the content hashes of any
/// files read.
pub fn parse_chi_spec(spec: &str) -> Result<(ChiFunction, BTreeMap<String, String>), CliError> {
    let mut inputs = BTreeMap::new();
    let bad = |msg: String| CliError::Config(format!("chi spec `{spec}`: {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected const:<k>, affine:<a>,<b>, or table:<path>".into()))?;
    let chi = match kind {
        "const" => {
            let kappa: f64 = rest.trim().parse().map_err(|e| bad(format!("bad number: {e}")))?;
            ChiFunction::Constant { kappa }
        }
        "affine" => {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| bad("affine needs two comma-separated numbers".into()))?;
            let a: f64 = a.trim().parse().map_err(|e| bad(format!("bad number: {e}")))?;
            let b: f64 = b.trim().parse().map_err(|e| bad(format!("bad number: {e}")))?;
            ChiFunction::Affine { a, b }
        }
        "table" => {
            let bytes = std::fs::read(rest)
                .map_err(|e| bad(format!("cannot read table {rest}: {e}")))?;
            inputs.insert(rest.to_string(), sha256_hex(&bytes));
            let nodes: Vec<(f64, f64)> = serde_json::from_slice(&bytes)
                .map_err(|e| bad(format!("table {rest} must be a JSON array of [v, value]: {e}")))?;
            ChiFunction::Tabulated { nodes }
        }
        other => return Err(bad(format!("unknown kind `{other}`"))),
    };
    Ok((chi, inputs))
}

/// A surface slope, either a named preset or a literal coefficient of `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaSpec {
    /// `eta = c/2`.
    Half,
    /// `eta = 5c/8`.
    FiveEighths,
    /// A fixed numeric slope, independent of `c`.
    Value(f64),
}

impl EtaSpec {
    /// Concrete slope for a given speed.
    pub fn resolve(&self, c: f64) -> f64 {
        match self {
            EtaSpec::Half => 0.5 * c,
            EtaSpec::FiveEighths => 0.625 * c,
            EtaSpec::Value(v) => *v,
        }
    }

    /// Canonical name used in reports.
    pub fn label(&self) -> String {
        match self {
            EtaSpec::Half => "half".into(),
            EtaSpec::FiveEighths => "five-eighths".into(),
            EtaSpec::Value(v) => format!("{v}"),
        }
    }
}

/// Parses an `--eta` argument: `half`, `five-eighths`, or a number.
/// A couple of historical spellings are accepted as aliases.
pub fn parse_eta_spec(spec: &str) -> Result<EtaSpec, CliError> {
    match spec.trim() {
        "half" => Ok(EtaSpec::Half),
        "five-eighths" | "5c/8" | "paper" => Ok(EtaSpec::FiveEighths),
        other => other.parse().map(EtaSpec::Value).map_err(|_| {
            CliError::Config(format!("eta spec `{spec}`: expected half, five-eighths, or a number"))
        }),
    }
}
