//! Steady states, trace–determinant classification, invariant lines,
//! nullclines and phase-field sampling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Field, LinearSystem, Regime, State, Velocity};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::output::fmt_f64;

/// |det| below this is a classification boundary.
pub const DET_TOL: f64 = 1e-14;
/// |trace| below this (with det > 0) is a center.
pub const TRACE_TOL: f64 = 1e-14;
/// |trace² − 4 det| below this is a repeated eigenvalue.
pub const DISC_TOL: f64 = 1e-12;

/// Closed-form steady state of the field used for trajectories.
///
/// Normal policy gives the natural point (with a spending shift when g > 0).
/// At i = 0 one expression covers NK, WUNK and η > 0:
/// x = x^n + (r^n + (S/δ)ηg)/(u'(0) − (1+η)S/δ), π = −r^n + u'(0)(x − x^n),
/// where S is the Phillips output coefficient times ((ε−1)/ε)^{η/(1+η)}.
pub fn steady_state(p: &ModelParams, regime: Regime, g: f64) -> Result<State> {
    // Validates g against η.
    Field::for_trajectories(p, regime, g)?;
    let state = steady_state_unchecked(p, regime, g)?;
    if !(state.x > 0.0) {
        return Err(Error::NonpositiveOutput { x: state.x });
    }
    Ok(state)
}

/// The closed form without the positivity check; the linearized field has
/// no domain restriction.
pub(crate) fn steady_state_unchecked(p: &ModelParams, regime: Regime, g: f64) -> Result<State> {
    let x_n = p.c_natural();
    let r_n = p.r_natural();
    let eta = p.eta();
    let s_over_delta = p.phillips_slope() / (1.0 + p.eta());
    let phillips_slope = p.phillips_slope();
    let shift = s_over_delta * eta * g;

    let state = match regime {
        Regime::NormalRule if g == 0.0 => State::new(x_n, 0.0),
        Regime::NormalRule => {
            // u' dc + (φ−1) π = 0 and π = slope·dc + shift
            let denom = p.mu_w() + (p.phi() - 1.0) * phillips_slope;
            if denom.abs() < 1e-14 {
                return Err(Error::DegenerateDenominator(format!(
                    "u'(0) + (phi - 1)*slope = {denom:e}"
                )));
            }
            let dc = -(p.phi() - 1.0) * shift / denom;
            State::new(x_n + dc, phillips_slope * dc + shift)
        }
        Regime::Zlb | Regime::Peg => {
            let denom = p.mu_w() - phillips_slope;
            if denom.abs() < 1e-14 * p.mu_w().max(phillips_slope) {
                return Err(Error::DegenerateDenominator(format!(
                    "u'(0) - slope = {denom:e}"
                )));
            }
            let dc = (r_n + shift) / denom;
            State::new(x_n + dc, -r_n + p.mu_w() * dc)
        }
    };
    Ok(state)
}

/// Local type of a planar linear system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Saddle,
    NodalSource,
    SpiralSource,
    NodalSink,
    SpiralSink,
    Center,
}

impl Kind {
    pub fn is_source(self) -> bool {
        matches!(self, Kind::NodalSource | Kind::SpiralSource)
    }
    pub fn is_sink(self) -> bool {
        matches!(self, Kind::NodalSink | Kind::SpiralSink)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

/// A real eigenvalue with its unit eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: [f64; 2],
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: Kind,
    pub trace: f64,
    pub det: f64,
    pub discriminant: f64,
    /// Sorted by decreasing real part.
    pub eigenvalues: [Complex64; 2],
    /// Present only for real, distinct eigenvalues; same order as `eigenvalues`.
    pub eigenpairs: Vec<EigenPair>,
}

pub fn classify(sys: &LinearSystem) -> Result<Classification> {
    let m = sys.matrix();
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite matrix {m:?}")));
    }
    let trace = sys.trace();
    let det = sys.det();
    let discriminant = trace * trace - 4.0 * det;

    if det.abs() < DET_TOL {
        return Err(Error::ClassificationBoundary(format!(
            "det = {det:e} is indistinguishable from zero"
        )));
    }
    if discriminant.abs() < DISC_TOL {
        return Err(Error::RepeatedEigenvalue { discriminant });
    }

    let kind = if det < 0.0 {
        Kind::Saddle
    } else if trace.abs() < TRACE_TOL {
        Kind::Center
    } else {
        match (trace > 0.0, discriminant > 0.0) {
            (true, true) => Kind::NodalSource,
            (true, false) => Kind::SpiralSource,
            (false, true) => Kind::NodalSink,
            (false, false) => Kind::SpiralSink,
        }
    };

    let (eigenvalues, eigenpairs) = if discriminant > 0.0 {
        let root = discriminant.sqrt();
        // Larger-magnitude root first, the other from the product, to avoid cancellation.
        let big = 0.5 * (trace + trace.signum() * root);
        let big = if trace == 0.0 { 0.5 * root } else { big };
        let small = det / big;
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        let pairs = [hi, lo]
            .into_iter()
            .map(|value| EigenPair {
                value,
                vector: eigenvector(&m, value),
                stability: if value < 0.0 {
                    Stability::Stable
                } else {
                    Stability::Unstable
                },
            })
            .collect();
        ([Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)], pairs)
    } else {
        let im = 0.5 * (-discriminant).sqrt();
        let re = 0.5 * trace;
        ([Complex64::new(re, im), Complex64::new(re, -im)], Vec::new())
    };

    Ok(Classification {
        kind,
        trace,
        det,
        discriminant,
        eigenvalues,
        eigenpairs,
    })
}

/// Unit null vector of M − μI, first nonzero component positive.
fn eigenvector(m: &[[f64; 2]; 2], mu: f64) -> [f64; 2] {
    let from_row1 = [m[0][1], mu - m[0][0]];
    let from_row2 = [mu - m[1][1], m[1][0]];
    let n1 = from_row1[0].hypot(from_row1[1]);
    let n2 = from_row2[0].hypot(from_row2[1]);
    let (v, n) = if n1 >= n2 { (from_row1, n1) } else { (from_row2, n2) };
    let mut v = [v[0] / n, v[1] / n];
    let lead = if v[0] != 0.0 { v[0] } else { v[1] };
    if lead < 0.0 {
        v = [-v[0], -v[1]];
    }
    // Avoid printing -0.
    v.map(|c| if c == 0.0 { 0.0 } else { c })
}

/// An eigenline through a steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: State,
    /// Unit vector.
    pub direction: [f64; 2],
    /// The eigenvalue along this line.
    pub rate: f64,
}

impl Line {
    /// Cross product of (s − point) with the direction: zero on the line,
    /// sign tells the side.
    pub fn signed_distance(&self, s: State) -> f64 {
        let dx = s.x - self.point.x;
        let dp = s.pi - self.point.pi;
        dx * self.direction[1] - dp * self.direction[0]
    }

    pub fn is_stable(&self) -> bool {
        self.rate < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantLines {
    pub stable: Vec<Line>,
    pub unstable: Vec<Line>,
}

/// Stable and unstable eigenlines through the expansion point.
pub fn invariant_lines(sys: &LinearSystem) -> Result<InvariantLines> {
    let class = classify(sys)?;
    if class.eigenpairs.is_empty() {
        return Err(Error::ComplexEigenvalues(format!("{:?}", class.kind)));
    }
    let mut lines = InvariantLines {
        stable: Vec::new(),
        unstable: Vec::new(),
    };
    for pair in &class.eigenpairs {
        let line = Line {
            point: sys.point(),
            direction: pair.vector,
            rate: pair.value,
        };
        match pair.stability {
            Stability::Stable => lines.stable.push(line),
            Stability::Unstable => lines.unstable.push(line),
        }
    }
    Ok(lines)
}

/// A nullcline in the (x, π) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nullcline {
    /// π = intercept + slope·(x − x^n).
    Line { slope: f64, intercept: f64, x_ref: f64 },
    /// x = x_at for every π.
    Vertical { x_at: f64 },
}

impl Nullcline {
    pub fn pi_at(&self, x: f64) -> Option<f64> {
        match *self {
            Nullcline::Line {
                slope,
                intercept,
                x_ref,
            } => Some(intercept + slope * (x - x_ref)),
            Nullcline::Vertical { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nullclines {
    pub euler: Nullcline,
    pub phillips: Nullcline,
}

impl Nullclines {
    /// Where the two nullclines cross; `None` when parallel.
    pub fn intersection(&self) -> Option<State> {
        match (self.euler, self.phillips) {
            (
                Nullcline::Line {
                    slope: se,
                    intercept: ie,
                    x_ref,
                },
                Nullcline::Line {
                    slope: sp,
                    intercept: ip,
                    ..
                },
            ) => {
                if se == sp {
                    return None;
                }
                let dx = (ip - ie) / (se - sp);
                Some(State::new(x_ref + dx, ie + se * dx))
            }
            (Nullcline::Vertical { x_at }, phillips) => {
                phillips.pi_at(x_at).map(|pi| State::new(x_at, pi))
            }
            (_, Nullcline::Vertical { .. }) => None,
        }
    }

    /// CSV with columns `kind,slope,intercept`; intercepts are π at x = x^n.
    /// A vertical Euler nullcline is written with slope `inf` and its x in the
    /// intercept column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,slope,intercept\n");
        for (name, line) in [("euler", self.euler), ("phillips", self.phillips)] {
            let (slope, intercept) = match line {
                Nullcline::Line {
                    slope, intercept, ..
                } => (slope, intercept),
                Nullcline::Vertical { x_at } => (f64::INFINITY, x_at),
            };
            out.push_str(&format!("{name},{},{}\n", fmt_f64(slope), fmt_f64(intercept)));
        }
        out
    }
}

/// Euler (ẋ = 0) and Phillips (π̇ = 0) nullclines of the trajectory field.
pub fn nullclines(p: &ModelParams, regime: Regime, g: f64) -> Result<Nullclines> {
    Field::for_trajectories(p, regime, g)?;
    let x_n = p.c_natural();
    let mu = p.mu_w();
    let euler = match regime {
        Regime::NormalRule => {
            let phi_gap = p.phi() - 1.0;
            if phi_gap != 0.0 {
                Nullcline::Line {
                    slope: -mu / phi_gap,
                    intercept: 0.0,
                    x_ref: x_n,
                }
            } else if mu > 0.0 {
                Nullcline::Vertical { x_at: x_n }
            } else {
                return Err(Error::DegenerateNullcline(
                    "phi = 1 and u'(0) = 0: the Euler equation holds at every point".into(),
                ));
            }
        }
        Regime::Zlb | Regime::Peg => Nullcline::Line {
            slope: mu,
            intercept: -p.r_natural(),
            x_ref: x_n,
        },
    };
    let slope = p.phillips_slope();
    let phillips = Nullcline::Line {
        slope,
        intercept: slope / (1.0 + p.eta()) * p.eta() * g,
        x_ref: x_n,
    };
    Ok(Nullclines { euler, phillips })
}

/// Rectangular sampling grid. One point on an axis sits at the midpoint of
/// its range; zero points gives an empty field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub pi_min: f64,
    pub pi_max: f64,
    pub npi: usize,
}

impl GridSpec {
    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    /// Grid points, π rows outer, x columns inner.
    pub fn points(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.npi).flat_map(move |j| {
            let pi = Self::coord(self.pi_min, self.pi_max, self.npi, j);
            (0..self.nx).map(move |i| State::new(Self::coord(self.x_min, self.x_max, self.nx, i), pi))
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.npi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub state: State,
    pub velocity: Velocity,
}

/// Samples the trajectory field over `grid` in row-major order.
pub fn phase_field(
    p: &ModelParams,
    regime: Regime,
    g: f64,
    grid: &GridSpec,
) -> Result<Vec<FieldSample>> {
    let field = Field::for_trajectories(p, regime, g)?;
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let bounds = [grid.x_min, grid.x_max, grid.pi_min, grid.pi_max];
    if bounds.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("grid", "bounds must be finite"));
    }
    if grid.x_min.min(grid.x_max) <= 0.0 {
        return Err(Error::Domain(format!(
            "phase grid must lie in x > 0, got x range [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    grid.points()
        .map(|state| {
            Ok(FieldSample {
                state,
                velocity: field.eval(state)?,
            })
        })
        .collect()
}

/// CSV with columns `x,pi,dx,dpi`.
pub fn phase_field_csv(samples: &[FieldSample]) -> String {
    let mut out = String::with_capacity(32 + samples.len() * 100);
    out.push_str("x,pi,dx,dpi\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(s.state.x),
            fmt_f64(s.state.pi),
            fmt_f64(s.velocity.dx),
            fmt_f64(s.velocity.dpi)
        ));
    }
    out
}
