//! Euler–Phillips vector fields under each policy regime.
//!
//! With η = 0 the state is (output y, inflation π) and the nonlinear field is
//! the one used for trajectories. With η > 0 the state is (private
//! consumption c, π); the nonlinear field is kept for validation, and the
//! scenario layer works with the system linearized around (c^n, 0, g = 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Steady-state check tolerance used by [`jacobian`], in velocity norm.
pub const STEADY_STATE_TOL: f64 = 1e-9;

/// Monetary-policy regime.
///
/// `Zlb` and `Peg` both set i = 0 and produce identical fields; `Peg` marks
/// the forward-guidance phase (i = 0 while r^n > 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    #[serde(rename = "normal", alias = "normal_rule")]
    NormalRule,
    Zlb,
    Peg,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::NormalRule => "normal",
            Regime::Zlb => "zlb",
            Regime::Peg => "peg",
        }
    }

    pub fn at_zero_rate(self) -> bool {
        !matches!(self, Regime::NormalRule)
    }

    /// dr/dπ for the real policy rate: φ − 1 under the rule, −1 at i = 0.
    fn rate_slope(self, phi: f64) -> f64 {
        match self {
            Regime::NormalRule => phi - 1.0,
            Regime::Zlb | Regime::Peg => -1.0,
        }
    }

    /// r(π) − r^n.
    fn rate_gap(self, phi: f64, r_n: f64, pi: f64) -> f64 {
        match self {
            Regime::NormalRule => (phi - 1.0) * pi,
            Regime::Zlb | Regime::Peg => -pi - r_n,
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "normal" | "normal_rule" | "normal-rule" => Ok(Regime::NormalRule),
            "zlb" => Ok(Regime::Zlb),
            "peg" => Ok(Regime::Peg),
            other => Err(format!("unknown regime `{other}` (expected normal, zlb or peg)")),
        }
    }
}

/// A point in the phase plane: activity `x` (y or c) and inflation `pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub pi: f64,
}

impl State {
    pub const fn new(x: f64, pi: f64) -> Self {
        State { x, pi }
    }

    pub fn distance(self, other: State) -> f64 {
        (self.x - other.x).hypot(self.pi - other.pi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub dx: f64,
    pub dpi: f64,
}

impl Velocity {
    pub fn norm(self) -> f64 {
        self.dx.hypot(self.dpi)
    }
}

/// 2×2 linearization `M` together with its expansion point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    pub x_star: f64,
    pub pi_star: f64,
}

impl LinearSystem {
    pub fn from_matrix(m: [[f64; 2]; 2], at: State) -> Self {
        LinearSystem {
            m11: m[0][0],
            m12: m[0][1],
            m21: m[1][0],
            m22: m[1][1],
            x_star: at.x,
            pi_star: at.pi,
        }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.m11, self.m12], [self.m21, self.m22]]
    }

    pub fn point(&self) -> State {
        State::new(self.x_star, self.pi_star)
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        (self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22)
            .sqrt()
    }

    /// M·(s − s*).
    pub fn apply(&self, s: State) -> Velocity {
        let dx = s.x - self.x_star;
        let dp = s.pi - self.pi_star;
        Velocity {
            dx: self.m11 * dx + self.m12 * dp,
            dpi: self.m21 * dx + self.m22 * dp,
        }
    }
}

/// Which form of the Euler–Phillips system a [`Field`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldForm {
    Nonlinear,
    Linearized,
}

/// A vector field with its parameters resolved, ready for repeated evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Field {
    form: FieldForm,
    regime: Regime,
    spending: f64,
    params: ModelParams,
    x_n: f64,
    r_n: f64,
    /// εκ/(γa)
    k_out: f64,
    /// (1+η)((ε−1)/ε)^{η/(1+η)}
    scale: f64,
}

impl Field {
    /// The nonlinear system; η = 0 gives (ẏ, π̇), η > 0 gives (ċ, π̇) with y = c + g.
    pub fn baseline(params: &ModelParams, regime: Regime, spending: f64) -> Result<Self> {
        check_spending(spending)?;
        if params.eta() == 0.0 && spending != 0.0 {
            return Err(Error::param(
                "g",
                "government spending requires eta > 0 in the nonlinear field",
            ));
        }
        Ok(Self::build(FieldForm::Nonlinear, params, regime, spending))
    }

    /// The system linearized around (c^n, π = 0, g = 0).
    pub fn linearized_gov(params: &ModelParams, regime: Regime, spending: f64) -> Result<Self> {
        check_spending(spending)?;
        Ok(Self::build(FieldForm::Linearized, params, regime, spending))
    }

    /// The field trajectories are computed with: nonlinear for η = 0, linearized for η > 0.
    pub fn for_trajectories(params: &ModelParams, regime: Regime, spending: f64) -> Result<Self> {
        if params.eta() == 0.0 && spending == 0.0 {
            Self::baseline(params, regime, spending)
        } else {
            Self::linearized_gov(params, regime, spending)
        }
    }

    fn build(form: FieldForm, params: &ModelParams, regime: Regime, spending: f64) -> Self {
        Field {
            form,
            regime,
            spending,
            params: *params,
            x_n: params.c_natural(),
            r_n: params.r_natural(),
            k_out: params.phillips_output_coeff(),
            scale: params.phillips_scale(),
        }
    }

    pub fn form(&self) -> FieldForm {
        self.form
    }
    pub fn regime(&self) -> Regime {
        self.regime
    }
    pub fn spending(&self) -> f64 {
        self.spending
    }
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn eval(&self, s: State) -> Result<Velocity> {
        match self.form {
            FieldForm::Nonlinear => self.eval_nonlinear(s),
            FieldForm::Linearized => Ok(self.eval_linearized(s)),
        }
    }

    fn eval_nonlinear(&self, s: State) -> Result<Velocity> {
        if !(s.x > 0.0) {
            return Err(Error::Domain(format!(
                "activity must be positive for the nonlinear field, got x = {}",
                s.x
            )));
        }
        let p = &self.params;
        let gap = self.regime.rate_gap(p.phi(), self.r_n, s.pi) + p.mu_w() * (s.x - self.x_n);
        let dx = s.x * gap;
        let dpi = if p.eta() == 0.0 {
            p.delta() * s.pi - self.k_out * (s.x - self.x_n)
        } else {
            let eps = p.epsilon();
            let y = s.x + self.spending;
            let cost = eps / (eps - 1.0)
                * (p.kappa() / p.a()).powf(1.0 + p.eta())
                * y.powf(p.eta())
                * s.x;
            p.delta() * s.pi + (eps - 1.0) * y / (p.gamma() * s.x) * (1.0 - cost)
        };
        Ok(Velocity { dx, dpi })
    }

    fn eval_linearized(&self, s: State) -> Velocity {
        let p = &self.params;
        let dc = s.x - self.x_n;
        let euler = match self.regime {
            Regime::NormalRule => (p.phi() - 1.0) * s.pi + p.mu_w() * dc,
            Regime::Zlb | Regime::Peg => -self.r_n - s.pi + p.mu_w() * dc,
        };
        let shift = self.k_out
            * p.convexity_factor()
            * ((1.0 + p.eta()) * dc + p.eta() * self.spending);
        Velocity {
            dx: self.x_n * euler,
            dpi: p.delta() * s.pi - shift,
        }
    }

    /// Analytic Jacobian of the field at `at`.
    ///
    /// For the linearized form this is the constant matrix M; for the
    /// nonlinear η = 0 field it is the exact derivative at `at`.
    pub fn jacobian_at(&self, at: State) -> [[f64; 2]; 2] {
        let p = &self.params;
        let phillips_row = [-self.k_out * self.scale, p.delta()];
        match self.form {
            FieldForm::Linearized => [
                [
                    p.mu_w() * self.x_n,
                    self.regime.rate_slope(p.phi()) * self.x_n,
                ],
                phillips_row,
            ],
            FieldForm::Nonlinear if p.eta() == 0.0 => {
                let gap = self.regime.rate_gap(p.phi(), self.r_n, at.pi)
                    + p.mu_w() * (at.x - self.x_n);
                [
                    [gap + at.x * p.mu_w(), at.x * self.regime.rate_slope(p.phi())],
                    phillips_row,
                ]
            }
            FieldForm::Nonlinear => self.nonlinear_convex_jacobian(at),
        }
    }

    fn nonlinear_convex_jacobian(&self, at: State) -> [[f64; 2]; 2] {
        let p = &self.params;
        let eta = p.eta();
        let eps = p.epsilon();
        let gap =
            self.regime.rate_gap(p.phi(), self.r_n, at.pi) + p.mu_w() * (at.x - self.x_n);
        let g = self.spending;
        let c = at.x;
        let y = c + g;
        let k = eps / (eps - 1.0) * (p.kappa() / p.a()).powf(1.0 + eta);
        // π̇ = δπ + A(c)·(1 − k y^η c), A(c) = (ε−1)(c+g)/(γc)
        let a_c = (eps - 1.0) * y / (p.gamma() * c);
        let da_c = -(eps - 1.0) * g / (p.gamma() * c * c);
        let b = 1.0 - k * y.powf(eta) * c;
        let db = -k * (eta * y.powf(eta - 1.0) * c + y.powf(eta));
        [
            [gap + c * p.mu_w(), c * self.regime.rate_slope(p.phi())],
            [da_c * b + a_c * db, p.delta()],
        ]
    }
}

fn check_spending(g: f64) -> Result<()> {
    if g.is_finite() && g >= 0.0 {
        Ok(())
    } else {
        Err(Error::param("g", format!("{g} must be finite and >= 0")))
    }
}

/// The nonlinear Euler–Phillips field.
pub fn field_baseline(s: State, p: &ModelParams, r: Regime, g: f64) -> Result<Velocity> {
    Field::baseline(p, r, g)?.eval(s)
}

/// The field linearized around the natural steady state without spending.
pub fn field_linearized_gov(s: State, p: &ModelParams, r: Regime, g: f64) -> Result<Velocity> {
    Field::linearized_gov(p, r, g)?.eval(s)
}

/// Linearization at a steady state of the field used for trajectories.
///
/// η = 0: the nonlinear field's Jacobian at `at`. η > 0: the constant
/// matrix of the linearized system. `at` must zero the field to within
/// [`STEADY_STATE_TOL`].
pub fn jacobian(p: &ModelParams, r: Regime, at: State, g: f64) -> Result<LinearSystem> {
    let field = Field::for_trajectories(p, r, g)?;
    let residual = field.eval(at)?.norm();
    if !(residual <= STEADY_STATE_TOL) {
        return Err(Error::NotSteadyState { residual });
    }
    Ok(LinearSystem::from_matrix(field.jacobian_at(at), at))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParamId;
    use approx::assert_relative_eq;

    fn p0() -> ModelParams {
        ModelParams::builder(0.108, 6.0, 1.0, 500.0, 1.0, 0.15, 1.5)
            .build()
            .unwrap()
    }

    fn p0_nk() -> ModelParams {
        p0().with(ParamId::MuW, 0.0).unwrap()
    }

    #[test]
    fn natural_steady_state_is_at_rest() {
        let p = p0_nk();
        let v = field_baseline(State::new(p.y_natural(), 0.0), &p, Regime::NormalRule, 0.0)
            .unwrap();
        assert_eq!(v.dx, 0.0);
        assert_eq!(v.dpi, 0.0);
    }

    #[test]
    fn hand_substituted_velocity() {
        let p = p0_nk();
        let v = field_baseline(State::new(p.y_natural(), 0.01), &p, Regime::NormalRule, 0.0)
            .unwrap();
        assert_relative_eq!(v.dx, 5.0 / 6.0 * 0.5 * 0.01, max_relative = 1e-14);
        assert_relative_eq!(v.dpi, 0.00108, max_relative = 1e-14);
    }

    #[test]
    fn wunk_zlb_steady_state_is_at_rest() {
        let p = p0();
        let k = p.phillips_slope();
        let r_n = p.r_natural();
        let pi_z = r_n / (p.mu_w() / k - 1.0);
        let y_z = p.y_natural() + r_n / (p.mu_w() - k);
        assert_relative_eq!(y_z, 0.396190, epsilon = 1e-6);
        assert_relative_eq!(pi_z, -0.048571, epsilon = 1e-6);
        let v = field_baseline(State::new(y_z, pi_z), &p, Regime::Zlb, 0.0).unwrap();
        assert!(v.dx.abs() < 1e-12 && v.dpi.abs() < 1e-12, "{v:?}");
    }

    #[test]
    fn nonpositive_activity_is_a_domain_error() {
        let p = p0();
        for x in [0.0, -0.1] {
            let e = field_baseline(State::new(x, 0.0), &p, Regime::Zlb, 0.0).unwrap_err();
            assert!(matches!(e, Error::Domain(_)));
        }
    }

    #[test]
    fn spending_needs_convex_labor_in_nonlinear_field() {
        let p = p0();
        assert!(Field::baseline(&p, Regime::Zlb, 0.01).is_err());
        assert!(Field::baseline(&p, Regime::Zlb, -0.01).is_err());
    }

    #[test]
    fn linearized_reads_off() {
        let p = p0().with(ParamId::Eta, 1.0).unwrap();
        let c_n = p.c_natural();
        let v = field_linearized_gov(State::new(c_n, 0.0), &p, Regime::Zlb, 0.0).unwrap();
        assert_relative_eq!(v.dx, -c_n * p.r_natural(), max_relative = 1e-15);
        assert_eq!(v.dpi, 0.0);

        let p = p
            .with(ParamId::MuW, 0.35)
            .unwrap();
        let v = field_linearized_gov(State::new(c_n, 0.0), &p, Regime::Zlb, 0.01).unwrap();
        assert_relative_eq!(v.dpi, -0.012 * (5.0f64 / 6.0).sqrt() * 0.01, max_relative = 1e-12);
        assert_relative_eq!(v.dpi, -1.0954e-4, epsilon = 1e-8);
    }

    #[test]
    fn zlb_and_peg_fields_coincide() {
        let p = p0();
        let s = State::new(0.7, -0.01);
        let a = field_baseline(s, &p, Regime::Zlb, 0.0).unwrap();
        let b = field_baseline(s, &p, Regime::Peg, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jacobian_examples() {
        let p = p0_nk();
        let m = jacobian(&p, Regime::NormalRule, State::new(p.y_natural(), 0.0), 0.0).unwrap();
        assert_eq!(m.m11, 0.0);
        assert_relative_eq!(m.m12, 0.416667, epsilon = 1e-6);
        assert_relative_eq!(m.m21, -0.012, max_relative = 1e-14);
        assert_eq!(m.m22, 0.108);

        let p = p0();
        let k = p.phillips_slope();
        let r_n = p.r_natural();
        let at = State::new(p.y_natural() + r_n / (p.mu_w() - k), r_n / (p.mu_w() / k - 1.0));
        let m = jacobian(&p, Regime::Zlb, at, 0.0).unwrap();
        assert_relative_eq!(m.m11, 0.059429, epsilon = 1e-6);
        assert_relative_eq!(m.m12, -0.396190, epsilon = 1e-6);
        assert_relative_eq!(m.m21, -0.012, max_relative = 1e-14);
        assert_eq!(m.m22, p.delta());
    }

    #[test]
    fn jacobian_rejects_non_steady_points() {
        let p = p0();
        let e = jacobian(&p, Regime::Zlb, State::new(0.8, 0.0), 0.0).unwrap_err();
        assert!(matches!(e, Error::NotSteadyState { residual } if residual > 1e-3));
    }

    #[test]
    fn reduction_to_baseline_at_natural_point() {
        let p = p0();
        let at = State::new(p.y_natural(), 0.0);
        let lin = Field::linearized_gov(&p, Regime::NormalRule, 0.0).unwrap();
        let base = Field::baseline(&p, Regime::NormalRule, 0.0).unwrap();
        assert_eq!(lin.jacobian_at(at), base.jacobian_at(at));
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("zlb".parse::<Regime>().unwrap(), Regime::Zlb);
        assert_eq!("normal".parse::<Regime>().unwrap(), Regime::NormalRule);
        assert!("taylor".parse::<Regime>().is_err());
    }
}
