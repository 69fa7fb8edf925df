//! Run configuration: a flat `key = value` file, overridden by flags.

use std::path::Path;

use serde::Deserialize;
use theta_lab::domain::DEFAULT_TOL;
use theta_lab::groups::DEFAULT_GROUP_CAP;
use theta_lab::hilbert::MATRIX_TOL;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tol_roots: f64,
    pub tol_matrix: f64,
    /// Degree window for module commands; None picks the per-n default.
    pub degree: Option<u32>,
    pub seed: u64,
    pub group_cap: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol_roots: DEFAULT_TOL,
            tol_matrix: MATRIX_TOL,
            degree: None,
            seed: 0,
            group_cap: DEFAULT_GROUP_CAP,
            format: Format::Json,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    tol_roots: Option<f64>,
    tol_matrix: Option<f64>,
    degree: Option<u32>,
    seed: Option<u64>,
    group_cap: Option<u64>,
    format: Option<Format>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| UsageError(format!("config: {}", e.message())))?;
        let d = Self::default();
        let cfg = Self {
            tol_roots: file.tol_roots.unwrap_or(d.tol_roots),
            tol_matrix: file.tol_matrix.unwrap_or(d.tol_matrix),
            degree: file.degree.or(d.degree),
            seed: file.seed.unwrap_or(d.seed),
            group_cap: file.group_cap.unwrap_or(d.group_cap),
            format: file.format.unwrap_or(d.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        for (name, v) in [("tol_roots", self.tol_roots), ("tol_matrix", self.tol_matrix)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(UsageError(format!("{name} must be positive, got {v}")));
            }
        }
        if self.group_cap == 0 {
            return Err(UsageError("group_cap must be positive".into()));
        }
        Ok(())
    }
}
