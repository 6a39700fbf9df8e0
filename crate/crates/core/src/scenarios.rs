//! ZLB experiments as terminal-condition problems.
//!
//! Every experiment ends at the natural steady state; the path before that is
//! found by integrating the relevant field backward in time with a fixed-step
//! RK4 scheme and re-emitting the samples in forward order.

use serde::{Deserialize, Serialize};

use crate::analysis::{invariant_lines, steady_state, steady_state_unchecked, Line};
use crate::dynamics::{jacobian, Field, FieldForm, LinearSystem, Regime, State, Velocity};
use crate::error::{Error, Result};
use crate::model::{ModelParams, ParamId};
use crate::output::fmt_f64;

/// Default integration step, in quarters.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Activity at or below this level aborts a nonlinear integration.
pub const X_MIN: f64 = 1e-9;

/// Anything the integrator can march through.
pub trait PhaseField {
    fn velocity(&self, s: State) -> Result<Velocity>;

    /// Whether activity must stay above [`X_MIN`].
    fn requires_positive(&self) -> bool;
}

impl PhaseField for Field {
    fn velocity(&self, s: State) -> Result<Velocity> {
        self.eval(s)
    }

    fn requires_positive(&self) -> bool {
        self.form() == FieldForm::Nonlinear
    }
}

/// The affine field ṡ = M(s − s*).
impl PhaseField for LinearSystem {
    fn velocity(&self, s: State) -> Result<Velocity> {
        Ok(self.apply(s))
    }

    fn requires_positive(&self) -> bool {
        false
    }
}

/// One classic RK4 step of signed size `h`.
pub fn rk4_step<F: PhaseField + ?Sized>(field: &F, s: State, h: f64) -> Result<State> {
    let shift = |v: Velocity, c: f64| State::new(s.x + c * v.dx, s.pi + c * v.dpi);
    let k1 = field.velocity(s)?;
    let k2 = field.velocity(shift(k1, 0.5 * h))?;
    let k3 = field.velocity(shift(k2, 0.5 * h))?;
    let k4 = field.velocity(shift(k3, h))?;
    Ok(State::new(
        s.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
        s.pi + h / 6.0 * (k1.dpi + 2.0 * k2.dpi + 2.0 * k3.dpi + k4.dpi),
    ))
}

/// Number of uniform steps no longer than `step` covering `duration`.
fn step_count(duration: f64, step: f64) -> usize {
    if duration == 0.0 {
        0
    } else {
        ((duration / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(Error::param("step", format!("{step} must be finite and > 0")))
    }
}

/// Marches `duration` from `start` at time `t0` in direction `dir` (±1),
/// calling `visit(t, s)` after each step. Returns the final state.
fn march<F: PhaseField + ?Sized>(
    field: &F,
    start: State,
    t0: f64,
    duration: f64,
    dir: f64,
    step: f64,
    mut visit: impl FnMut(f64, State),
) -> Result<State> {
    let n = step_count(duration, step);
    let h = if n == 0 { 0.0 } else { duration / n as f64 };
    let guard = field.requires_positive();
    let mut s = start;
    for i in 1..=n {
        let t = if i == n {
            t0 + dir * duration
        } else {
            t0 + dir * (i as f64 * h)
        };
        s = match rk4_step(field, s, dir * h) {
            Ok(next) => next,
            Err(Error::Domain(_)) if guard => return Err(Error::PositivityBreach { t, x: s.x }),
            Err(e) => return Err(e),
        };
        if !(s.x.is_finite() && s.pi.is_finite()) {
            return Err(Error::Domain(format!("integration diverged at t = {t}")));
        }
        if guard && s.x <= X_MIN {
            return Err(Error::PositivityBreach { t, x: s.x });
        }
        visit(t, s);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    pub regime: Regime,
}

/// A time-sampled path in forward order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub step: f64,
}

impl Trajectory {
    pub fn initial(&self) -> State {
        self.samples[0].state
    }

    pub fn terminal(&self) -> State {
        self.samples[self.samples.len() - 1].state
    }

    pub fn horizon(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// The sample at exactly time `t`, if one was recorded.
    pub fn at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| s.t == t)
    }

    /// Keeps every `every`-th sample plus the last one.
    pub fn thinned(&self, every: usize) -> Trajectory {
        let every = every.max(1);
        let last = self.samples.len() - 1;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .filter(|(i, _)| i % every == 0 || *i == last)
            .map(|(_, s)| *s)
            .collect();
        Trajectory {
            samples,
            step: self.step,
        }
    }

    /// CSV with header `t,x,pi,regime`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 + self.samples.len() * 80);
        out.push_str("t,x,pi,regime\n");
        for s in &self.samples {
            out.push_str(&fmt_f64(s.t));
            out.push(',');
            out.push_str(&fmt_f64(s.state.x));
            out.push(',');
            out.push_str(&fmt_f64(s.state.pi));
            out.push(',');
            out.push_str(s.regime.name());
            out.push('\n');
        }
        out
    }
}

/// Integrates backward from `terminal` at `t_end` down to 0; samples come
/// out in forward order and the last one is `terminal` exactly.
pub fn integrate_backward<F: PhaseField + ?Sized>(
    field: &F,
    terminal: State,
    t_end: f64,
    step: f64,
    regime: Regime,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    backward_segment(field, terminal, 0.0, t_end, step, regime, &mut samples)?;
    samples.reverse();
    Ok(Trajectory { samples, step })
}

/// Appends the terminal sample and then the backward path over
/// [t_start, t_end], in backward order.
fn backward_segment<F: PhaseField + ?Sized>(
    field: &F,
    terminal: State,
    t_start: f64,
    t_end: f64,
    step: f64,
    regime: Regime,
    out: &mut Vec<Sample>,
) -> Result<State> {
    check_step(step)?;
    if !(t_end >= t_start) || !t_end.is_finite() {
        return Err(Error::param("t_end", format!("{t_end} must be finite and >= {t_start}")));
    }
    if field.requires_positive() && !(terminal.x > X_MIN) {
        return Err(Error::Domain(format!("terminal activity {} must be positive", terminal.x)));
    }
    out.reserve(step_count(t_end - t_start, step) + 1);
    out.push(Sample {
        t: t_end,
        state: terminal,
        regime,
    });
    let last = march(field, terminal, t_end, t_end - t_start, -1.0, step, |t, state| {
        out.push(Sample { t, state, regime })
    })?;
    // Pin the first time exactly.
    if let Some(first) = out.last_mut() {
        first.t = t_start;
    }
    Ok(last)
}

/// Backward integration that keeps only the state reached at time 0.
pub fn integrate_backward_endpoint<F: PhaseField + ?Sized>(
    field: &F,
    terminal: State,
    duration: f64,
    step: f64,
) -> Result<State> {
    check_step(step)?;
    march(field, terminal, duration, duration, -1.0, step, |_, _| {})
}

/// Forward integration from `initial` at 0 to `t_end`.
pub fn integrate_forward<F: PhaseField + ?Sized>(
    field: &F,
    initial: State,
    t_end: f64,
    step: f64,
    regime: Regime,
) -> Result<Trajectory> {
    check_step(step)?;
    let mut samples = vec![Sample {
        t: 0.0,
        state: initial,
        regime,
    }];
    march(field, initial, 0.0, t_end, 1.0, step, |t, state| {
        samples.push(Sample { t, state, regime })
    })?;
    Ok(Trajectory { samples, step })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    ZlbEpisode,
    ForwardGuidance,
    GovSpending,
}

/// What pushes the natural rate below zero during the ZLB and back above it
/// afterward: a spread shock (`sigma_zlb` > `sigma_normal`) or a shock to the
/// marginal utility of wealth (`mu_w_normal` set), never both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shock {
    pub sigma_zlb: f64,
    #[serde(default)]
    pub sigma_normal: f64,
    /// u'(0) after the ZLB; the parameter record's value applies during it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_w_normal: Option<f64>,
}

/// Parameter records for the two policy phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phases {
    pub zlb: ModelParams,
    pub normal: ModelParams,
}

impl Shock {
    pub fn spread(sigma_zlb: f64) -> Self {
        Shock {
            sigma_zlb,
            sigma_normal: 0.0,
            mu_w_normal: None,
        }
    }

    pub fn wealth(mu_w_normal: f64) -> Self {
        Shock {
            sigma_zlb: 0.0,
            sigma_normal: 0.0,
            mu_w_normal: Some(mu_w_normal),
        }
    }

    /// Builds both phases; r^n must be negative in the ZLB phase and positive after.
    pub fn phases(&self, p: &ModelParams) -> Result<Phases> {
        if self.mu_w_normal.is_some() && self.sigma_zlb != self.sigma_normal {
            return Err(Error::InfeasibleScenario(
                "a spread shock and a mu_w shock cannot both be set".into(),
            ));
        }
        let zlb = p.with(ParamId::Sigma, self.sigma_zlb)?;
        let mut normal = p.with(ParamId::Sigma, self.sigma_normal)?;
        if let Some(mu) = self.mu_w_normal {
            normal = normal.with(ParamId::MuW, mu)?;
        }
        if !(zlb.r_natural() < 0.0) {
            return Err(Error::InfeasibleScenario(format!(
                "natural rate during the ZLB must be negative, got {}",
                zlb.r_natural()
            )));
        }
        if !(normal.r_natural() > 0.0) {
            return Err(Error::InfeasibleScenario(format!(
                "natural rate after the ZLB must be positive, got {}",
                normal.r_natural()
            )));
        }
        Ok(Phases { zlb, normal })
    }
}

/// One of the three experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    /// ZLB duration in quarters.
    #[serde(rename = "T")]
    pub duration: f64,
    /// Guidance duration in quarters (forward guidance only).
    #[serde(rename = "Delta", default)]
    pub guidance: f64,
    /// Government spending (spending scenario only).
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub sigma_zlb: f64,
    #[serde(default)]
    pub sigma_normal: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_w_normal: Option<f64>,
}

impl Scenario {
    fn new(kind: ScenarioKind, duration: f64, shock: Shock) -> Self {
        Scenario {
            kind,
            duration,
            guidance: 0.0,
            g: 0.0,
            sigma_zlb: shock.sigma_zlb,
            sigma_normal: shock.sigma_normal,
            mu_w_normal: shock.mu_w_normal,
        }
    }

    pub fn zlb_episode(duration: f64, shock: Shock) -> Self {
        Self::new(ScenarioKind::ZlbEpisode, duration, shock)
    }

    pub fn forward_guidance(duration: f64, guidance: f64, shock: Shock) -> Self {
        Scenario {
            guidance,
            ..Self::new(ScenarioKind::ForwardGuidance, duration, shock)
        }
    }

    pub fn gov_spending(duration: f64, g: f64, shock: Shock) -> Self {
        Scenario {
            g,
            ..Self::new(ScenarioKind::GovSpending, duration, shock)
        }
    }

    pub fn shock(&self) -> Shock {
        Shock {
            sigma_zlb: self.sigma_zlb,
            sigma_normal: self.sigma_normal,
            mu_w_normal: self.mu_w_normal,
        }
    }

    /// End of the experiment: T, plus Δ under forward guidance.
    pub fn horizon(&self) -> f64 {
        self.duration + self.guidance
    }

    pub fn validate(&self, p: &ModelParams) -> Result<Phases> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::InfeasibleScenario(format!("T = {} must be > 0", self.duration)));
        }
        if !(self.guidance.is_finite() && self.guidance >= 0.0) {
            return Err(Error::InfeasibleScenario(format!(
                "Delta = {} must be >= 0",
                self.guidance
            )));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InfeasibleScenario(format!("g = {} must be >= 0", self.g)));
        }
        if self.guidance != 0.0 && self.kind != ScenarioKind::ForwardGuidance {
            return Err(Error::InfeasibleScenario(
                "Delta applies to forward_guidance only".into(),
            ));
        }
        if self.g != 0.0 && self.kind != ScenarioKind::GovSpending {
            return Err(Error::InfeasibleScenario("g applies to gov_spending only".into()));
        }
        if self.kind == ScenarioKind::GovSpending && p.eta() == 0.0 {
            return Err(Error::InfeasibleScenario(
                "government spending needs convex labor disutility (eta > 0)".into(),
            ));
        }
        self.shock().phases(p)
    }
}

fn natural_point(p: &ModelParams) -> State {
    State::new(p.c_natural(), 0.0)
}

/// Solves the experiment backward from the natural steady state.
pub fn run_scenario(p: &ModelParams, s: &Scenario, step: f64) -> Result<Trajectory> {
    check_step(step)?;
    let phases = s.validate(p)?;
    let end = natural_point(p);
    match s.kind {
        ScenarioKind::ZlbEpisode => {
            let field = Field::for_trajectories(&phases.zlb, Regime::Zlb, 0.0)?;
            integrate_backward(&field, end, s.duration, step, Regime::Zlb)
        }
        ScenarioKind::GovSpending => {
            let field = Field::linearized_gov(&phases.zlb, Regime::Zlb, s.g)?;
            integrate_backward(&field, end, s.duration, step, Regime::Zlb)
        }
        ScenarioKind::ForwardGuidance => {
            let peg = Field::for_trajectories(&phases.normal, Regime::Peg, 0.0)?;
            let zlb = Field::for_trajectories(&phases.zlb, Regime::Zlb, 0.0)?;
            let mut samples = Vec::new();
            let joined =
                backward_segment(&peg, end, s.duration, s.horizon(), step, Regime::Peg, &mut samples)?;
            // The ZLB segment starts from the very sample the peg segment ended on.
            samples.pop();
            backward_segment(&zlb, joined, 0.0, s.duration, step, Regime::Zlb, &mut samples)?;
            samples.reverse();
            Ok(Trajectory { samples, step })
        }
    }
}

/// Centered-difference spending multiplier 1 + [c(0; g+s/2) − c(0; g−s/2)]/s.
///
/// Both runs start the ZLB at the parameter record's own spread, whose
/// natural rate must be negative; the path uses the linearized field.
pub fn multiplier(p: &ModelParams, duration: f64, g: f64, spread: f64, step: f64) -> Result<f64> {
    check_step(step)?;
    if p.eta() == 0.0 {
        return Err(Error::Requirement("the multiplier needs eta > 0".into()));
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::param("s", format!("{spread} must be finite and > 0")));
    }
    if !(g - spread / 2.0 >= 0.0) {
        return Err(Error::param("g", format!("g - s/2 = {} must be >= 0", g - spread / 2.0)));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::param("T", format!("{duration} must be finite and > 0")));
    }
    if !(p.r_natural() < 0.0) {
        return Err(Error::InfeasibleScenario(format!(
            "natural rate must be negative, got {}",
            p.r_natural()
        )));
    }
    let c0 = |level: f64| -> Result<f64> {
        let field = Field::linearized_gov(p, Regime::Zlb, level)?;
        Ok(integrate_backward_endpoint(&field, natural_point(p), duration, step)?.x)
    };
    let hi = c0(g + spread / 2.0)?;
    let lo = c0(g - spread / 2.0)?;
    Ok(1.0 + (hi - lo) / spread)
}

/// The long-ZLB limit of the multiplier:
/// 1 + η / (u'(0)(δγa/εκ)(ε/(ε−1))^{η/(1+η)} − (1+η)).
pub fn multiplier_limit(p: &ModelParams) -> Result<f64> {
    let eta = p.eta();
    let markup = p.epsilon() / (p.epsilon() - 1.0);
    let denominator = p.mu_w() * (p.delta() / p.phillips_output_coeff())
        * markup.powf(eta / (1.0 + eta))
        - (1.0 + eta);
    if !(denominator > 0.0) {
        return Err(Error::InfiniteLimit { denominator });
    }
    Ok(1.0 + eta / denominator)
}

/// Outcome of a one-dimensional threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub step: f64,
}

/// Bisection on a bracket whose endpoints have values of opposite sign.
/// Stops once |f| < tol; returns (root, residual, iterations).
fn bisect(
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64, usize)> {
    for iteration in 1..=200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.abs() < tol {
            return Ok((mid, f_mid.abs(), iteration));
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs() {
            return Err(Error::BracketFailure(format!(
                "bracket collapsed at {mid} with residual {f_mid:e} above {tol:e}"
            )));
        }
    }
    Err(Error::BracketFailure("no convergence in 200 bisections".into()))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::param("tol", format!("{tol} must be finite and > 0")))
    }
}

/// The ZLB unstable line of an NK saddle.
fn zlb_unstable_line(zlb: &ModelParams, g: f64) -> Result<(Line, LinearSystem)> {
    let ss = steady_state_unchecked(zlb, Regime::Zlb, g)?;
    let m = jacobian(zlb, Regime::Zlb, ss, g)?;
    let lines = invariant_lines(&m)?;
    match (lines.stable.len(), lines.unstable.first()) {
        (1, Some(line)) => Ok((*line, m)),
        _ => Err(Error::Requirement("the ZLB steady state must be a saddle".into())),
    }
}

/// Longest guidance the NK search scans before giving up.
const GUIDANCE_SCAN_LIMIT: f64 = 2000.0;
const GUIDANCE_SCAN_CHUNK: f64 = 0.25;

/// Guidance length Δ* that puts the economy on the ZLB unstable line at T.
///
/// Longer guidance turns any NK ZLB episode into a boom.
pub fn guidance_threshold_nk(
    p: &ModelParams,
    shock: &Shock,
    tol: f64,
    step: f64,
) -> Result<ThresholdReport> {
    check_step(step)?;
    check_tol(tol)?;
    let phases = shock.phases(p)?;
    phases.zlb.require_nk("the guidance threshold")?;
    let (line, _) = zlb_unstable_line(&phases.zlb, 0.0)?;
    let peg = Field::for_trajectories(&phases.normal, Regime::Peg, 0.0)?;

    let mut state = natural_point(p);
    let mut delta = 0.0;
    let d0 = line.signed_distance(state);
    if d0.abs() < tol {
        return Ok(ThresholdReport {
            value: 0.0,
            residual: d0.abs(),
            iterations: 0,
            step,
        });
    }
    while delta < GUIDANCE_SCAN_LIMIT {
        let next = integrate_backward_endpoint(&peg, state, GUIDANCE_SCAN_CHUNK, step)
            .map_err(|e| {
                Error::BracketFailure(format!("peg phase failed while scanning at {delta}: {e}"))
            })?;
        let d = line.signed_distance(next);
        if (d < 0.0) != (d0 < 0.0) || d.abs() < tol {
            let start = state;
            let base = delta;
            let f_lo = line.signed_distance(start);
            if d.abs() < tol {
                return Ok(ThresholdReport {
                    value: base + GUIDANCE_SCAN_CHUNK,
                    residual: d.abs(),
                    iterations: 0,
                    step,
                });
            }
            let (value, residual, iterations) =
                bisect(base, f_lo, base + GUIDANCE_SCAN_CHUNK, tol, |dl| {
                    let s = integrate_backward_endpoint(&peg, start, dl - base, step)?;
                    Ok(line.signed_distance(s))
                })?;
            return Ok(ThresholdReport {
                value,
                residual,
                iterations,
                step,
            });
        }
        state = next;
        delta += GUIDANCE_SCAN_CHUNK;
    }
    Err(Error::BracketFailure(format!(
        "distance to the unstable line keeps its sign on [0, {GUIDANCE_SCAN_LIMIT}]"
    )))
}

/// Spending g* that puts the natural steady state on the unstable line of
/// the ZLB-with-spending steady state (NK, η > 0).
pub fn spending_threshold_nk(p: &ModelParams, shock: &Shock, tol: f64) -> Result<ThresholdReport> {
    check_tol(tol)?;
    if p.eta() == 0.0 {
        return Err(Error::Requirement("the spending threshold needs eta > 0".into()));
    }
    let phases = shock.phases(p)?;
    phases.zlb.require_nk("the spending threshold")?;
    let (line0, _) = zlb_unstable_line(&phases.zlb, 0.0)?;
    let target = natural_point(p);
    let residual = |g: f64| -> Result<f64> {
        let ss = steady_state_unchecked(&phases.zlb, Regime::Zlb, g)?;
        Ok(Line { point: ss, ..line0 }.signed_distance(target))
    };
    let f0 = residual(0.0)?;
    if f0.abs() < tol {
        return Ok(ThresholdReport {
            value: 0.0,
            residual: f0.abs(),
            iterations: 0,
            step: 0.0,
        });
    }
    let mut hi = 0.01;
    while (residual(hi)? < 0.0) == (f0 < 0.0) {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::BracketFailure(
                "the unstable line never reaches the natural steady state".into(),
            ));
        }
    }
    let (value, residual, iterations) = bisect(0.0, f0, hi, tol, residual)?;
    Ok(ThresholdReport {
        value,
        residual,
        iterations,
        step: 0.0,
    })
}

/// One row of the WUNK threshold grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidanceRow {
    pub delta: f64,
    /// Past this ZLB duration, π(0) < 0.
    pub t_hat: f64,
}

/// Grid-approximate T*: ZLB durations above it yield a slump whatever the
/// guidance length on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WunkThreshold {
    pub value: f64,
    /// Guidance length attaining the maximum.
    pub argmax_delta: f64,
    pub delta_max: f64,
    /// Spacing of the Δ grid; T* is exact only on the grid.
    pub grid_resolution: f64,
    pub rows: Vec<GuidanceRow>,
    pub step: f64,
}

/// Cap on backward integration when waiting for a path to settle.
const SETTLE_LIMIT: f64 = 50_000.0;
const SETTLE_CHUNK: f64 = 1.0;

/// Guidance length after which the peg-attained state is within 1e−6 of the
/// peg steady state.
pub fn default_delta_max(p: &ModelParams, shock: &Shock, step: f64) -> Result<f64> {
    check_step(step)?;
    let phases = shock.phases(p)?;
    let target = steady_state(&phases.normal, Regime::Peg, 0.0)?;
    let peg = Field::for_trajectories(&phases.normal, Regime::Peg, 0.0)?;
    let mut state = natural_point(p);
    let mut delta = 0.0;
    while state.distance(target) > 1e-6 {
        if delta >= SETTLE_LIMIT {
            return Err(Error::Requirement(
                "the peg phase does not settle; the normal-time parameters must be WUNK".into(),
            ));
        }
        state = integrate_backward_endpoint(&peg, state, SETTLE_CHUNK, step)?;
        delta += SETTLE_CHUNK;
    }
    Ok(delta)
}

/// Last backward time at which π ≥ 0 on the ZLB path ending at `start`,
/// refined inside the final RK4 step to within `tol` quarters.
fn last_nonnegative_inflation(
    field: &Field,
    start: State,
    settle: State,
    step: f64,
    tol: f64,
) -> Result<f64> {
    let radius = 1e-3 * settle.pi.abs();
    let h = step;
    let mut s = start;
    let mut t = 0.0;
    let mut last: Option<(f64, State)> = (s.pi >= 0.0).then_some((0.0, s));
    loop {
        if s.pi < 0.0 && s.distance(settle) <= radius {
            break;
        }
        if t > SETTLE_LIMIT {
            return Err(Error::Requirement("the ZLB path does not settle".into()));
        }
        let next = rk4_step(field, s, -h)?;
        if next.pi >= 0.0 {
            last = Some((t + h, next));
        }
        s = next;
        t += h;
    }
    let Some((t_last, s_last)) = last else {
        return Ok(0.0);
    };
    // π turns negative within the next step; bisect on the substep length.
    let (mut lo, mut hi) = (0.0, h);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rk4_step(field, s_last, -mid)?.pi >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(t_last + lo)
}

/// T* for WUNK parameters over `grid` guidance lengths spread on [0, Δ_max].
pub fn zlb_threshold_wunk(
    p: &ModelParams,
    shock: &Shock,
    delta_max: Option<f64>,
    grid: usize,
    tol: f64,
    step: f64,
) -> Result<WunkThreshold> {
    check_step(step)?;
    check_tol(tol)?;
    if grid == 0 {
        return Err(Error::param("grid", "at least one guidance length is needed"));
    }
    let phases = shock.phases(p)?;
    phases.zlb.require_wunk("the ZLB threshold")?;
    let delta_max = match delta_max {
        Some(d) if d.is_finite() && d >= 0.0 => d,
        Some(d) => return Err(Error::param("delta_max", format!("{d} must be >= 0"))),
        None => default_delta_max(p, shock, step)?,
    };
    let spacing = if grid > 1 {
        delta_max / (grid - 1) as f64
    } else {
        0.0
    };
    let peg = Field::for_trajectories(&phases.normal, Regime::Peg, 0.0)?;
    let zlb = Field::for_trajectories(&phases.zlb, Regime::Zlb, 0.0)?;
    let settle = steady_state(&phases.zlb, Regime::Zlb, 0.0)?;

    let mut rows = Vec::with_capacity(grid);
    let mut attained = natural_point(p);
    for k in 0..grid {
        let delta = if k + 1 == grid && grid > 1 {
            delta_max
        } else {
            k as f64 * spacing
        };
        if k > 0 {
            attained = integrate_backward_endpoint(&peg, attained, spacing, step)?;
        }
        let t_hat = last_nonnegative_inflation(&zlb, attained, settle, step, tol)?;
        rows.push(GuidanceRow { delta, t_hat });
    }
    let best = rows
        .iter()
        .copied()
        .fold(rows[0], |a, b| if b.t_hat > a.t_hat { b } else { a });
    Ok(WunkThreshold {
        value: best.t_hat,
        argmax_delta: best.delta,
        delta_max,
        grid_resolution: spacing,
        rows,
        step,
    })
}
