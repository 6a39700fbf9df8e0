use thiserror::Error;

/// Errors raised by the engine.
///
/// Parameter problems and numerical failures are kept apart so the CLI can
/// map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state outside the model domain: {0}")]
    Domain(String),

    #[error("not a steady state of the selected field (velocity residual {residual:e})")]
    NotSteadyState { residual: f64 },

    #[error("steady state has nonpositive activity x = {x}")]
    NonpositiveOutput { x: f64 },

    #[error("degenerate denominator at the WUNK boundary: {0}")]
    DegenerateDenominator(String),

    #[error("classification boundary: {0}")]
    ClassificationBoundary(String),

    #[error("repeated eigenvalue (discriminant {discriminant:e})")]
    RepeatedEigenvalue { discriminant: f64 },

    #[error("complex eigenvalues: invariant lines are undefined for {0}")]
    ComplexEigenvalues(String),

    #[error("degenerate nullcline: {0}")]
    DegenerateNullcline(String),

    #[error("positivity breach: x fell to {x:e} at t = {t}")]
    PositivityBreach { t: f64, x: f64 },

    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("the multiplier has no finite limit (denominator {denominator:e} <= 0)")]
    InfiniteLimit { denominator: f64 },

    #[error("requirement not met: {0}")]
    Requirement(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PositivityBreach { .. }
                | Error::BracketFailure(_)
                | Error::NotSteadyState { .. }
                | Error::NonpositiveOutput { .. }
                | Error::DegenerateDenominator(_)
                | Error::ClassificationBoundary(_)
                | Error::RepeatedEigenvalue { .. }
                | Error::ComplexEigenvalues(_)
                | Error::DegenerateNullcline(_)
                | Error::InfiniteLimit { .. }
                | Error::Domain(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
