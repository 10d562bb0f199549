//! CSV formatting, manifests and the no-clobber write step.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use jrc_core::scenario::ScenarioSummary;
use jrc_core::ScenarioConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::params::Params;

/// Nine significant digits in scientific notation; `inf`/`-inf`/`nan` spelled out.
pub fn sci(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.8e}")
    }
}

pub struct Csv {
    text: String,
    rows: usize,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self {
            text: format!("{header}\n"),
            rows: 0,
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| sci(v)).collect();
        self.raw_row(&cells);
    }

    pub fn raw_row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    bytes
}

/// One file a command produced, held in memory until everything succeeded.
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub params: Params,
    /// Path the scenario was read from, informational only.
    pub scenario_file: Option<String>,
    /// The configuration actually used; replays read this, not the file.
    pub scenario: Option<ScenarioConfig>,
    pub scenario_summary: Option<ScenarioSummary>,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
    /// Primary output first.
    pub outputs: Vec<String>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Manifest {
        path: path.to_owned(),
        source,
    })
}

/// Writes every artifact, or nothing if any target already exists and
/// `force` is off.
pub fn commit(artifacts: &[Artifact], force: bool) -> Result<(), CliError> {
    if !force {
        if let Some(a) = artifacts.iter().find(|a| a.path.exists()) {
            return Err(CliError::Exists(a.path.clone()));
        }
    }
    for a in artifacts {
        fs::write(&a.path, &a.bytes).map_err(|e| CliError::io(&a.path, e))?;
    }
    Ok(())
}
