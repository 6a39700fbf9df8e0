//! Comparative statics of the permanent-ZLB steady state.
//!
//! With a permanently negative natural rate the economy sits at the ZLB
//! steady state, so the paradoxes reduce to signs of derivatives of its
//! closed form. Each derivative is computed analytically and checked against
//! a central finite difference of the same closed form.

use serde::{Deserialize, Serialize};

use crate::analysis::{steady_state, steady_state_unchecked};
use crate::dynamics::{Regime, State};
use crate::error::{Error, Result};
use crate::model::{check_wunk, ModelParams, ParamId};

/// The permanent change being studied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StaticShock {
    /// Marginal utility of wealth u'(0).
    Thrift,
    /// Disutility of labor κ.
    Toil,
    /// Technology a; moves output the same way a fall in κ does.
    Technology,
    /// Price-adjustment cost γ.
    Flexibility,
    /// Government spending, evaluated at level `g` (needs η > 0).
    Spending { g: f64 },
}

impl StaticShock {
    pub fn parameter(self) -> &'static str {
        match self {
            StaticShock::Thrift => ParamId::MuW.name(),
            StaticShock::Toil => ParamId::Kappa.name(),
            StaticShock::Technology => ParamId::A.name(),
            StaticShock::Flexibility => ParamId::Gamma.name(),
            StaticShock::Spending { .. } => "g",
        }
    }
}

impl std::str::FromStr for StaticShock {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "thrift" => Ok(StaticShock::Thrift),
            "toil" => Ok(StaticShock::Toil),
            "technology" => Ok(StaticShock::Technology),
            "flexibility" => Ok(StaticShock::Flexibility),
            "spending" => Ok(StaticShock::Spending { g: 0.0 }),
            other => Err(format!(
                "unknown shock `{other}` (expected thrift, toil, technology, flexibility or spending)"
            )),
        }
    }
}

/// Derivative of the steady state with respect to the shocked parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub dx: f64,
    pub dpi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// A derivative the paradox depends on is zero or not finite.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticsReport {
    pub shock: StaticShock,
    pub parameter: &'static str,
    pub value: f64,
    /// Absolute finite-difference step.
    pub step: f64,
    pub base: State,
    /// Steady state at `value + step`.
    pub shocked: State,
    pub analytic: Sensitivity,
    pub finite_difference: Sensitivity,
    /// d(output)/d(parameter); for spending this is dy/dg = 1 + dc/dg.
    pub output_response: f64,
    /// d(hours)/d(parameter) with hours = y/a, for the toil and technology shocks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hours_response: Option<f64>,
    pub verdict: Verdict,
}

impl StaticsReport {
    /// Largest relative gap between the analytic and finite-difference derivatives.
    pub fn max_relative_gap(&self) -> f64 {
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        rel(self.analytic.dx, self.finite_difference.dx)
            .max(rel(self.analytic.dpi, self.finite_difference.dpi))
    }
}

/// Strict sign test: every value must be finite, nonzero and of the expected sign.
fn judge(checks: &[(f64, bool)]) -> Verdict {
    if checks.iter().any(|(v, _)| *v == 0.0 || !v.is_finite()) {
        Verdict::Inconclusive
    } else if checks.iter().all(|(v, positive)| (*v > 0.0) == *positive) {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

/// Derivatives of the ZLB steady state with respect to one parameter.
///
/// `h` is the finite-difference step relative to the parameter's magnitude
/// (absolute for spending at g = 0).
pub fn comparative_static(p: &ModelParams, shock: StaticShock, h: f64) -> Result<StaticsReport> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param("h", format!("{h} must be finite and > 0")));
    }
    let wunk = check_wunk(p);
    if !wunk.holds {
        return Err(Error::Requirement(format!(
            "comparative statics need WUNK parameters: u'(0) = {} does not exceed {}",
            wunk.lhs, wunk.rhs
        )));
    }
    if !(p.r_natural() < 0.0) {
        return Err(Error::Requirement(format!(
            "the natural rate must be permanently negative, got {}",
            p.r_natural()
        )));
    }
    match shock {
        StaticShock::Spending { g } => spending(p, g, h),
        _ if p.eta() != 0.0 => Err(Error::Requirement(format!(
            "the {} shock is studied in the model with linear labor disutility (eta = 0)",
            shock.parameter()
        ))),
        _ => basic(p, shock, h),
    }
}

fn basic(p: &ModelParams, shock: StaticShock, h: f64) -> Result<StaticsReport> {
    let id = match shock {
        StaticShock::Thrift => ParamId::MuW,
        StaticShock::Toil => ParamId::Kappa,
        StaticShock::Technology => ParamId::A,
        StaticShock::Flexibility => ParamId::Gamma,
        StaticShock::Spending { .. } => unreachable!("handled by the caller"),
    };
    let base = steady_state(p, Regime::Zlb, 0.0)?;
    let y = base.x;
    let y_n = p.y_natural();
    let mu = p.mu_w();
    let slope = p.phillips_slope();
    let denom = mu - slope;
    let value = p.get(id);

    let analytic = match shock {
        StaticShock::Thrift => {
            let dy = -y / denom;
            Sensitivity { dx: dy, dpi: slope * dy }
        }
        StaticShock::Toil => {
            let k = p.kappa();
            Sensitivity {
                dx: y / denom * slope / k,
                dpi: slope / k * y * mu / denom,
            }
        }
        StaticShock::Technology => {
            let a = p.a();
            Sensitivity {
                dx: -y / denom * slope / a,
                dpi: -slope / a * y * mu / denom,
            }
        }
        StaticShock::Flexibility => {
            let gamma = p.gamma();
            Sensitivity {
                dx: slope / gamma * (y_n - y) / denom,
                dpi: slope / gamma * (y_n - y) * mu / denom,
            }
        }
        StaticShock::Spending { .. } => unreachable!(),
    };

    let step = h * value.abs();
    let at = |v: f64| -> Result<State> { steady_state(&p.with(id, v)?, Regime::Zlb, 0.0) };
    let up = at(value + step)?;
    let down = at(value - step)?;
    let finite_difference = Sensitivity {
        dx: (up.x - down.x) / (2.0 * step),
        dpi: (up.pi - down.pi) / (2.0 * step),
    };

    let (hours_response, verdict) = match shock {
        // Higher saving desire lowers output and inflation.
        StaticShock::Thrift => (None, judge(&[(analytic.dx, false), (analytic.dpi, false)])),
        // Lower disutility of labor lowers output and hours.
        StaticShock::Toil => {
            let dh = analytic.dx / p.a();
            (Some(dh), judge(&[(analytic.dx, true), (dh, true)]))
        }
        // Higher productivity lowers output and hours.
        StaticShock::Technology => {
            let a = p.a();
            let dh = analytic.dx / a - y / (a * a);
            (Some(dh), judge(&[(analytic.dx, false), (dh, false)]))
        }
        // Lower price-adjustment cost lowers output.
        StaticShock::Flexibility => (None, judge(&[(analytic.dx, true)])),
        StaticShock::Spending { .. } => unreachable!(),
    };

    Ok(StaticsReport {
        shock,
        parameter: shock.parameter(),
        value,
        step,
        base,
        shocked: up,
        analytic,
        finite_difference,
        output_response: analytic.dx,
        hours_response,
        verdict,
    })
}

fn spending(p: &ModelParams, g: f64, h: f64) -> Result<StaticsReport> {
    if p.eta() == 0.0 {
        return Err(Error::Requirement("the spending shock needs eta > 0".into()));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::param("g", format!("{g} must be finite and >= 0")));
    }
    let slope = p.phillips_slope();
    let denom = p.mu_w() - slope;
    // (S/δ)η with S/δ = slope/(1+η).
    let dc = slope / (1.0 + p.eta()) * p.eta() / denom;
    let analytic = Sensitivity {
        dx: dc,
        dpi: p.mu_w() * dc,
    };
    let base = steady_state_unchecked(p, Regime::Zlb, g)?;
    let step = h * g.abs().max(1.0);
    let up = steady_state_unchecked(p, Regime::Zlb, g + step)?;
    let down = steady_state_unchecked(p, Regime::Zlb, g - step)?;
    let finite_difference = Sensitivity {
        dx: (up.x - down.x) / (2.0 * step),
        dpi: (up.pi - down.pi) / (2.0 * step),
    };
    let output_response = 1.0 + dc;
    Ok(StaticsReport {
        shock: StaticShock::Spending { g },
        parameter: "g",
        value: g,
        step,
        base,
        shocked: up,
        analytic,
        finite_difference,
        output_response,
        hours_response: None,
        // Spending crowds in private consumption, so dy/dg > 1.
        verdict: judge(&[(dc, true)]),
    })
}
