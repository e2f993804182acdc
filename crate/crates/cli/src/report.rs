//! Machine-readable run documents, written as TOML.
//!
//! Field names are part of the external contract; absent optional fields
//! are omitted rather than written as placeholders.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::spec::RegionSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub re: f64,
    pub im: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    /// `certified` or `infeasible`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Set when the certificate search disagrees with the eigenvalue test.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub command: String,
    pub matrix: String,
    /// `stable` or `unstable`.
    pub verdict: String,
    pub worst_margin: f64,
    pub eigenvalues: Vec<EigenEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateEntry>,
    pub region: RegionSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearestConfig {
    pub max_outer_iterations: usize,
    pub rel_improvement_tol: f64,
    pub delta: f64,
    pub eps: f64,
    pub refine_period: usize,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Artifacts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// `ok` or `failed`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub matrix: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    pub config: NearestConfig,
    pub artifacts: Artifacts,
    #[serde(default)]
    pub objective_trajectory: Vec<f64>,
    pub region: RegionSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub j: String,
    pub r: String,
    pub p: String,
    /// `(J - R) P^{-1}` before noise.
    pub clean: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenReport {
    pub command: String,
    pub matrix: String,
    pub n: usize,
    pub eps_noise: f64,
    pub seed: u64,
    pub complex: bool,
    pub rng: String,
    pub gen_delta: f64,
    pub gen_eps: f64,
    pub ground_truth: GroundTruth,
    pub region: RegionSpec,
}

pub fn write_toml<T: Serialize>(path: &Path, doc: &T) -> CliResult<()> {
    let text = toml::to_string(doc).map_err(|e| CliError::Input(format!("cannot serialize report: {e}")))?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
