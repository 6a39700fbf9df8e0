use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read config `{}`: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid config `{}`: {source}", path.display())]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("cannot write `{}`: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] wunklab_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    /// Machine-readable description of a numerical failure.
    pub fn diagnostic(&self) -> Value {
        use wunklab_core::Error as E;
        let kind = match self {
            CliError::Model(e) => match e {
                E::InvalidParameter { .. } => "invalid_parameter",
                E::Domain(_) => "domain",
                E::NotSteadyState { .. } => "not_steady_state",
                E::NonpositiveOutput { .. } => "nonpositive_output",
                E::DegenerateDenominator(_) => "degenerate_denominator",
                E::ClassificationBoundary(_) => "classification_boundary",
                E::RepeatedEigenvalue { .. } => "repeated_eigenvalue",
                E::ComplexEigenvalues(_) => "complex_eigenvalues",
                E::DegenerateNullcline(_) => "degenerate_nullcline",
                E::PositivityBreach { .. } => "positivity_breach",
                E::InfeasibleScenario(_) => "infeasible_scenario",
                E::BracketFailure(_) => "bracket_failure",
                E::InfiniteLimit { .. } => "infinite_limit",
                E::Requirement(_) => "requirement",
            },
            _ => "config",
        };
        let mut out = json!({
            "error": kind,
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let CliError::Model(wunklab_core::Error::PositivityBreach { t, x }) = self {
            out["t"] = json!(t);
            out["x"] = json!(x);
        }
        out
    }
}
