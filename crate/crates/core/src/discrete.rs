//! The discrete-time model: exact equilibrium residuals, the log-linearized
//! coefficients, and the forward solution of the discounted Euler equation.
//!
//! This module exists to validate the continuous engine. Its one-step map
//! converges to the flow of the continuous linearization as the period
//! length shrinks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Coefficients of the log-linearized discrete model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoglinCoeffs {
    /// Weight on future output in the Euler equation, β/(β + u'(0)·y^n).
    pub alpha: f64,
    /// Output-gap coefficient of the Phillips curve, (ε−1)/γ.
    pub phillips_coeff: f64,
}

pub fn loglin_coeffs(p: &ModelParams) -> LoglinCoeffs {
    let beta = p.beta();
    LoglinCoeffs {
        alpha: beta / (beta + p.mu_w() * p.y_natural()),
        phillips_coeff: (p.epsilon() - 1.0) / p.gamma(),
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be finite and > 0")))
    }
}

/// q − u'(0)·y_t − β·p_t·y_t/(p_{t+1}·y_{t+1}), with q the gross nominal rate.
pub fn euler_residual_discrete(
    q: f64,
    y_t: f64,
    y_t1: f64,
    p_t: f64,
    p_t1: f64,
    params: &ModelParams,
) -> Result<f64> {
    positive("q", q)?;
    positive("y_t", y_t)?;
    positive("y_t1", y_t1)?;
    positive("p_t", p_t)?;
    positive("p_t1", p_t1)?;
    Ok(q - params.mu_w() * y_t - params.beta() * (p_t * y_t) / (p_t1 * y_t1))
}

/// Left minus right side of the discrete Phillips curve
/// Π_t(Π_t − 1) = β Π_{t+1}(Π_{t+1} − 1) + (ε−1)/γ·(y_t/y^n − 1), Π_t = p_t/p_{t−1}.
pub fn phillips_residual_discrete(
    p_prev: f64,
    p_t: f64,
    p_next: f64,
    y_t: f64,
    params: &ModelParams,
) -> Result<f64> {
    positive("p_prev", p_prev)?;
    positive("p_t", p_t)?;
    positive("p_next", p_next)?;
    positive("y_t", y_t)?;
    let now = p_t / p_prev;
    let next = p_next / p_t;
    let coeffs = loglin_coeffs(params);
    Ok(now * (now - 1.0)
        - params.beta() * next * (next - 1.0)
        - coeffs.phillips_coeff * (y_t / params.y_natural() - 1.0))
}

/// Policy rates i(k) and inflation π(k+1) for k = 0..=K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub policy_rate: Vec<f64>,
    /// Entry k is π(k+1).
    pub inflation: Vec<f64>,
}

impl DiscretePath {
    /// A path with the rate at `r_n` and zero inflation over K+1 periods.
    pub fn neutral(horizon: usize, r_n: f64) -> Self {
        DiscretePath {
            policy_rate: vec![r_n; horizon + 1],
            inflation: vec![0.0; horizon + 1],
        }
    }

    pub fn horizon(&self) -> usize {
        self.policy_rate.len().saturating_sub(1)
    }
}

/// Output gaps solved forward from a finite path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardSolution {
    /// ŷ(k) for k = 0..=K, assuming zero gaps beyond K.
    pub output_gap: Vec<f64>,
    /// α^{K+1}: weight of everything past the horizon on ŷ(0).
    pub tail_factor: f64,
}

impl ForwardSolution {
    pub fn initial_gap(&self) -> f64 {
        self.output_gap[0]
    }
}

/// ŷ(k) = −Σ_j α^j [i(k+j) − r^n − α π(k+j+1)], truncated at the horizon.
pub fn forward_solve_output(path: &DiscretePath, p: &ModelParams, r_n: f64) -> Result<ForwardSolution> {
    if path.policy_rate.is_empty() || path.policy_rate.len() != path.inflation.len() {
        return Err(Error::param(
            "path",
            format!(
                "policy_rate and inflation need the same nonzero length, got {} and {}",
                path.policy_rate.len(),
                path.inflation.len()
            ),
        ));
    }
    if path
        .policy_rate
        .iter()
        .chain(&path.inflation)
        .any(|v| !v.is_finite())
    {
        return Err(Error::param("path", "entries must be finite"));
    }
    let alpha = loglin_coeffs(p).alpha;
    let mut output_gap = vec![0.0; path.policy_rate.len()];
    let mut ahead = 0.0;
    for k in (0..output_gap.len()).rev() {
        let gap = path.policy_rate[k] - r_n - alpha * path.inflation[k];
        ahead = -gap + alpha * ahead;
        output_gap[k] = ahead;
    }
    Ok(ForwardSolution {
        output_gap,
        tail_factor: alpha.powi(path.policy_rate.len() as i32),
    })
}

/// Matrix of the continuous linearized system under the normal rule in
/// (output gap ŷ, inflation π) coordinates: [[u'(0)y^n, φ−1], [−(ε−1)/γ, δ]].
pub fn continuous_loglin_matrix(p: &ModelParams) -> [[f64; 2]; 2] {
    [
        [p.mu_w() * p.y_natural(), p.phi() - 1.0],
        [-(p.epsilon() - 1.0) / p.gamma(), p.delta()],
    ]
}

/// One period of the log-linearized discrete model with period length `dt`,
/// mapping (ŷ(t), π(t)) to (ŷ(t+1), π(t+1)) under the normal rule.
///
/// Rates are annualized to the continuous time unit: π is per unit time and
/// the per-period rate is π·dt. The discount factor is e^{−δ·dt}, so the
/// record's own `beta` is not used here.
pub fn one_step_map(p: &ModelParams, dt: f64) -> Result<[[f64; 2]; 2]> {
    positive("dt", dt)?;
    let beta = (-p.delta() * dt).exp();
    let alpha = beta / (beta + p.mu_w() * p.y_natural() * dt);
    let c = (p.epsilon() - 1.0) / p.gamma();
    let phi = p.phi();
    // π(t+1) = (π(t) − c·dt·ŷ(t))/β
    // ŷ(t+1) = ŷ(t)/α + φ·dt·π(t)/α − dt·π(t+1)
    Ok([
        [1.0 / alpha + c * dt * dt / beta, dt * (phi / alpha - 1.0 / beta)],
        [-c * dt / beta, 1.0 / beta],
    ])
}
