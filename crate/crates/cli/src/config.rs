//! Run configuration: one JSON document per invocation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wunklab_core::analysis::GridSpec;
use wunklab_core::dynamics::Regime;
use wunklab_core::statics::StaticShock;
use wunklab_core::scenarios::Scenario;
use wunklab_core::ModelParams;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub params: ModelParams,
    #[serde(default)]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub statics: Option<StaticShock>,
}

/// Which field `classify`, `nullclines` and `phase-field` look at.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    #[serde(default = "default_regime")]
    pub regime: Regime,
    #[serde(default)]
    pub g: f64,
}

impl Default for Analysis {
    fn default() -> Self {
        Analysis {
            regime: default_regime(),
            g: 0.0,
        }
    }
}

fn default_regime() -> Regime {
    Regime::NormalRule
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Relative step for finite-difference cross-checks.
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    /// Keep every n-th trajectory sample in CSV output.
    #[serde(default = "default_one")]
    pub thin: usize,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// Number of guidance lengths scanned by the WUNK threshold search.
    #[serde(default = "default_guidance_grid")]
    pub guidance_grid: usize,
    #[serde(default)]
    pub delta_max: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            step: default_step(),
            tol: default_tol(),
            fd_step: default_fd_step(),
            thin: default_one(),
            grid: None,
            guidance_grid: default_guidance_grid(),
            delta_max: None,
        }
    }
}

fn default_step() -> f64 {
    1e-3
}
fn default_tol() -> f64 {
    1e-9
}
fn default_fd_step() -> f64 {
    1e-6
}
fn default_one() -> usize {
    1
}
fn default_guidance_grid() -> usize {
    41
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Output {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// A one-dimensional sweep over a scenario field (`T`, `Delta`, `g`) or a
/// structural parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

fn bad(key: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(key, format!("{v} must be finite and > 0")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        let n = &self.numerics;
        positive("numerics.step", n.step)?;
        positive("numerics.tol", n.tol)?;
        positive("numerics.fd_step", n.fd_step)?;
        if n.thin == 0 {
            return Err(bad("numerics.thin", "must be >= 1"));
        }
        if n.guidance_grid < 2 {
            return Err(bad("numerics.guidance_grid", "must be >= 2"));
        }
        if let Some(d) = n.delta_max {
            positive("numerics.delta_max", d)?;
        }
        if let Some(g) = &n.grid {
            if !(g.x_min < g.x_max) || !(g.pi_min < g.pi_max) {
                return Err(bad("numerics.grid", "ranges need min < max"));
            }
        }
        if !self.analysis.g.is_finite() || self.analysis.g < 0.0 {
            return Err(bad("analysis.g", "must be finite and >= 0"));
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(bad("sweep.values", "must not be empty"));
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(bad("sweep.values", "entries must be finite"));
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        self.scenario
            .ok_or_else(|| bad("scenario", "this subcommand needs a scenario"))
    }

    pub fn sweep(&self) -> Result<&Sweep, CliError> {
        self.sweep
            .as_ref()
            .ok_or_else(|| bad("sweep", "this subcommand needs a sweep section"))
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        self.numerics
            .grid
            .ok_or_else(|| bad("numerics.grid", "phase-field needs a grid"))
    }
}
