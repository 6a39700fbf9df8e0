//! Structural parameters and the quantities derived from them in closed form.
//!
//! All rates are per quarter. A parameter record is validated once, at
//! construction, and is immutable afterwards; variants are produced with
//! [`ModelParams::with`], which re-validates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier for a single structural parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamId {
    Delta,
    Sigma,
    Epsilon,
    Kappa,
    Gamma,
    A,
    MuW,
    Eta,
    Phi,
    Beta,
}

impl ParamId {
    pub const ALL: [ParamId; 10] = [
        ParamId::Delta,
        ParamId::Sigma,
        ParamId::Epsilon,
        ParamId::Kappa,
        ParamId::Gamma,
        ParamId::A,
        ParamId::MuW,
        ParamId::Eta,
        ParamId::Phi,
        ParamId::Beta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamId::Delta => "delta",
            ParamId::Sigma => "sigma",
            ParamId::Epsilon => "epsilon",
            ParamId::Kappa => "kappa",
            ParamId::Gamma => "gamma",
            ParamId::A => "a",
            ParamId::MuW => "mu_w",
            ParamId::Eta => "eta",
            ParamId::Phi => "phi",
            ParamId::Beta => "beta",
        }
    }
}

fn default_beta() -> f64 {
    0.99
}

/// Wire form of [`ModelParams`]: exactly the documented keys, nothing else.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    delta: f64,
    #[serde(default)]
    sigma: f64,
    epsilon: f64,
    kappa: f64,
    gamma: f64,
    a: f64,
    mu_w: f64,
    #[serde(default)]
    eta: f64,
    phi: f64,
    #[serde(default = "default_beta")]
    beta: f64,
}

/// Validated structural parameters.
///
/// `mu_w` is the marginal utility of wealth at zero relative wealth; `eta` is
/// the inverse Frisch elasticity (zero gives linear disutility of labor);
/// `beta` is only used by the discrete-time module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    delta: f64,
    sigma: f64,
    epsilon: f64,
    kappa: f64,
    gamma: f64,
    a: f64,
    mu_w: f64,
    eta: f64,
    phi: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        let p = ModelParams {
            delta: r.delta,
            sigma: r.sigma,
            epsilon: r.epsilon,
            kappa: r.kappa,
            gamma: r.gamma,
            a: r.a,
            mu_w: r.mu_w,
            eta: r.eta,
            phi: r.phi,
            beta: r.beta,
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            delta: p.delta,
            sigma: p.sigma,
            epsilon: p.epsilon,
            kappa: p.kappa,
            gamma: p.gamma,
            a: p.a,
            mu_w: p.mu_w,
            eta: p.eta,
            phi: p.phi,
            beta: p.beta,
        }
    }
}

/// Builder with the documented defaults (`sigma = 0`, `eta = 0`, `beta = 0.99`).
#[derive(Debug, Clone, Copy)]
pub struct ParamsBuilder {
    raw: RawParams,
}

impl ParamsBuilder {
    pub fn sigma(mut self, v: f64) -> Self {
        self.raw.sigma = v;
        self
    }
    pub fn eta(mut self, v: f64) -> Self {
        self.raw.eta = v;
        self
    }
    pub fn beta(mut self, v: f64) -> Self {
        self.raw.beta = v;
        self
    }
    pub fn build(self) -> Result<ModelParams> {
        ModelParams::try_from(self.raw)
    }
}

impl ModelParams {
    /// Starts a builder from the eight parameters that have no default.
    #[allow(clippy::too_many_arguments)]
    pub fn builder(
        delta: f64,
        epsilon: f64,
        kappa: f64,
        gamma: f64,
        a: f64,
        mu_w: f64,
        phi: f64,
    ) -> ParamsBuilder {
        ParamsBuilder {
            raw: RawParams {
                delta,
                sigma: 0.0,
                epsilon,
                kappa,
                gamma,
                a,
                mu_w,
                eta: 0.0,
                phi,
                beta: default_beta(),
            },
        }
    }

    /// Parses a JSON parameter document; unknown keys are rejected.
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(ParamId, f64, bool, &str); 10] = [
            (ParamId::Delta, self.delta, self.delta > 0.0, "must be > 0"),
            (ParamId::Sigma, self.sigma, self.sigma >= 0.0, "must be >= 0"),
            (ParamId::Epsilon, self.epsilon, self.epsilon > 1.0, "must be > 1"),
            (ParamId::Kappa, self.kappa, self.kappa > 0.0, "must be > 0"),
            (ParamId::Gamma, self.gamma, self.gamma > 0.0, "must be > 0"),
            (ParamId::A, self.a, self.a > 0.0, "must be > 0"),
            (ParamId::MuW, self.mu_w, self.mu_w >= 0.0, "must be >= 0"),
            (ParamId::Eta, self.eta, self.eta >= 0.0, "must be >= 0"),
            (ParamId::Phi, self.phi, self.phi >= 0.0, "must be >= 0"),
            (
                ParamId::Beta,
                self.beta,
                self.beta > 0.0 && self.beta < 1.0,
                "must lie in (0, 1)",
            ),
        ];
        for (id, value, ok, rule) in checks {
            if !value.is_finite() {
                return Err(Error::param(id.name(), format!("{value} is not finite")));
            }
            if !ok {
                return Err(Error::param(id.name(), format!("{value} {rule}")));
            }
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn mu_w(&self) -> f64 {
        self.mu_w
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn get(&self, id: ParamId) -> f64 {
        match id {
            ParamId::Delta => self.delta,
            ParamId::Sigma => self.sigma,
            ParamId::Epsilon => self.epsilon,
            ParamId::Kappa => self.kappa,
            ParamId::Gamma => self.gamma,
            ParamId::A => self.a,
            ParamId::MuW => self.mu_w,
            ParamId::Eta => self.eta,
            ParamId::Phi => self.phi,
            ParamId::Beta => self.beta,
        }
    }

    /// Returns a copy with one parameter replaced, re-validated.
    pub fn with(&self, id: ParamId, value: f64) -> Result<Self> {
        let mut p = *self;
        match id {
            ParamId::Delta => p.delta = value,
            ParamId::Sigma => p.sigma = value,
            ParamId::Epsilon => p.epsilon = value,
            ParamId::Kappa => p.kappa = value,
            ParamId::Gamma => p.gamma = value,
            ParamId::A => p.a = value,
            ParamId::MuW => p.mu_w = value,
            ParamId::Eta => p.eta = value,
            ParamId::Phi => p.phi = value,
            ParamId::Beta => p.beta = value,
        }
        p.validate()?;
        Ok(p)
    }

    /// εκ/(γa): the output coefficient of the Phillips curve.
    pub fn phillips_output_coeff(&self) -> f64 {
        self.epsilon * self.kappa / (self.gamma * self.a)
    }

    /// (1+η)((ε−1)/ε)^{η/(1+η)}; exactly 1 when η = 0.
    pub fn phillips_scale(&self) -> f64 {
        if self.eta == 0.0 {
            1.0
        } else {
            let ratio = (self.epsilon - 1.0) / self.epsilon;
            (1.0 + self.eta) * ratio.powf(self.eta / (1.0 + self.eta))
        }
    }

    /// ((ε−1)/ε)^{η/(1+η)} alone; exactly 1 when η = 0.
    pub(crate) fn convexity_factor(&self) -> f64 {
        if self.eta == 0.0 {
            1.0
        } else {
            ((self.epsilon - 1.0) / self.epsilon).powf(self.eta / (1.0 + self.eta))
        }
    }

    /// Natural level of output, (ε−1)/ε · a/κ.
    pub fn y_natural(&self) -> f64 {
        (self.epsilon - 1.0) / self.epsilon * self.a / self.kappa
    }

    /// Natural level of private consumption; equals [`Self::y_natural`] when η = 0.
    pub fn c_natural(&self) -> f64 {
        if self.eta == 0.0 {
            self.y_natural()
        } else {
            ((self.epsilon - 1.0) / self.epsilon).powf(1.0 / (1.0 + self.eta)) * self.a
                / self.kappa
        }
    }

    /// Natural rate of interest, δ − σ − u'(0)·x^n.
    pub fn r_natural(&self) -> f64 {
        self.delta - self.sigma - self.mu_w * self.c_natural()
    }

    /// Slope of the steady-state Phillips line in the (x, π) plane.
    pub fn phillips_slope(&self) -> f64 {
        self.phillips_scale() * self.phillips_output_coeff() / self.delta
    }

    pub fn variant(&self) -> Variant {
        if self.mu_w == 0.0 {
            Variant::Nk
        } else if check_wunk(self).holds {
            Variant::Wunk
        } else {
            Variant::Intermediate
        }
    }

    pub(crate) fn require_wunk(&self, what: &str) -> Result<()> {
        let report = check_wunk(self);
        if report.holds {
            Ok(())
        } else {
            Err(Error::Requirement(format!(
                "{what} needs WUNK parameters: u'(0) = {} does not exceed {}",
                report.lhs, report.rhs
            )))
        }
    }

    pub(crate) fn require_nk(&self, what: &str) -> Result<()> {
        if self.mu_w == 0.0 {
            Ok(())
        } else {
            Err(Error::Requirement(format!(
                "{what} needs NK parameters (u'(0) = 0), got {}",
                self.mu_w
            )))
        }
    }
}

/// Which submodel a parameter record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// u'(0) = 0.
    Nk,
    /// u'(0) strictly above the Phillips slope.
    Wunk,
    /// 0 < u'(0) ≤ Phillips slope: neither submodel.
    Intermediate,
}

/// Closed-form quantities derived from a parameter record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub y_n: f64,
    pub c_n: f64,
    pub r_n: f64,
    pub phillips_slope: f64,
}

pub fn derive(params: &ModelParams) -> Result<Derived> {
    params.validate()?;
    Ok(Derived {
        y_n: params.y_natural(),
        c_n: params.c_natural(),
        r_n: params.r_natural(),
        phillips_slope: params.phillips_slope(),
    })
}

/// Outcome of the WUNK membership test, with both sides of the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WunkReport {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub footnote5_ok: bool,
}

/// u'(0) > slope of the steady-state Phillips line (strict), plus δ > sqrt((ε−1)/γ).
pub fn check_wunk(params: &ModelParams) -> WunkReport {
    let lhs = params.mu_w;
    let rhs = params.phillips_slope();
    WunkReport {
        holds: lhs > rhs,
        lhs,
        rhs,
        footnote5_ok: params.delta > ((params.epsilon - 1.0) / params.gamma).sqrt(),
    }
}

/// The WUNK condition in estimable statistics: δ − r^n > λ/δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn check_wunk_statistics(delta: f64, r_n: f64, lambda: f64) -> Result<StatReport> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", format!("{delta} must be > 0")));
    }
    if !r_n.is_finite() {
        return Err(Error::param("r_n", format!("{r_n} is not finite")));
    }
    if !lambda.is_finite() {
        return Err(Error::param("lambda", format!("{lambda} is not finite")));
    }
    let lhs = delta - r_n;
    let rhs = lambda / delta;
    Ok(StatReport {
        holds: lhs > rhs,
        lhs,
        rhs,
    })
}
