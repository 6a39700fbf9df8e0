#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wunklab_core::dynamics::{Field, State};
use wunklab_core::{ModelParams, ParamId};

pub type Matrix = [[f64; 2]; 2];

pub fn p0() -> ModelParams {
    ModelParams::builder(0.108, 6.0, 1.0, 500.0, 1.0, 0.15, 1.5)
        .build()
        .unwrap()
}

pub fn p0_nk() -> ModelParams {
    p0().with(ParamId::MuW, 0.0).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Structural parameters with δ² > (ε−1)/γ, so a positive-output WUNK ZLB
/// steady state exists for suitable spreads.
pub fn draw_base(rng: &mut ChaCha8Rng, mu_w: f64, phi: f64) -> ModelParams {
    let delta = rng.gen_range(0.01..0.2);
    let epsilon = rng.gen_range(2.0..12.0);
    let gamma = (epsilon - 1.0) / (delta * delta) * rng.gen_range(1.2..20.0);
    let kappa = rng.gen_range(0.5..2.0);
    let a = rng.gen_range(0.5..2.0);
    ModelParams::builder(delta, epsilon, kappa, gamma, a, mu_w, phi)
        .build()
        .unwrap()
}

pub fn draw_nk(rng: &mut ChaCha8Rng, phi: f64) -> ModelParams {
    draw_base(rng, 0.0, phi)
}

/// u'(0) drawn between 1.05 and 3 times the WUNK bound.
pub fn draw_wunk(rng: &mut ChaCha8Rng, phi: f64) -> ModelParams {
    let p = draw_base(rng, 0.0, phi);
    let bound = p.phillips_slope();
    p.with(ParamId::MuW, bound * rng.gen_range(1.05..3.0)).unwrap()
}

/// Convex labor; γ is scaled so that δ² > (1+η)(ε−1)/γ still holds.
pub fn draw_wunk_convex(rng: &mut ChaCha8Rng, phi: f64) -> ModelParams {
    let eta = rng.gen_range(0.2..3.0);
    let p = draw_base(rng, 0.0, phi);
    let p = p
        .with(ParamId::Gamma, p.gamma() * (1.0 + eta))
        .unwrap()
        .with(ParamId::Eta, eta)
        .unwrap();
    let bound = p.phillips_slope();
    p.with(ParamId::MuW, bound * rng.gen_range(1.05..3.0)).unwrap()
}

/// Adds a spread that makes r^n < 0 while the WUNK ZLB steady state keeps x > 0.
pub fn with_permanent_zlb(p: &ModelParams, rng: &mut ChaCha8Rng) -> ModelParams {
    let x_n = p.c_natural();
    let slope = p.phillips_slope();
    let lo = (p.delta() - p.mu_w() * x_n).max(0.0);
    let hi = p.delta() - slope * x_n;
    assert!(hi > lo, "no admissible spread for {p:?}");
    p.with(ParamId::Sigma, lo + (hi - lo) * rng.gen_range(0.1..0.9))
        .unwrap()
}

/// A spread pushing the NK natural rate below zero.
pub fn with_nk_zlb(p: &ModelParams, rng: &mut ChaCha8Rng) -> ModelParams {
    p.with(ParamId::Sigma, p.delta() + rng.gen_range(0.005..0.1))
        .unwrap()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Matrix exponential by scaling and squaring around a Taylor series.
pub fn expm(m: &Matrix) -> Matrix {
    let norm = m.iter().flatten().map(|v| v.abs()).sum::<f64>();
    let squarings = norm.log2().ceil().max(0.0) as i32 + 4;
    let scale = 0.5f64.powi(squarings);
    let a = [[m[0][0] * scale, m[0][1] * scale], [m[1][0] * scale, m[1][1] * scale]];
    let mut term = [[1.0, 0.0], [0.0, 1.0]];
    let mut sum = term;
    for k in 1..30 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

pub fn mat_vec(m: &Matrix, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Central-difference Jacobian of a field.
pub fn fd_jacobian(field: &Field, at: State, h: f64) -> Matrix {
    let eval = |s: State| field.eval(s).unwrap();
    let dx_p = eval(State::new(at.x + h, at.pi));
    let dx_m = eval(State::new(at.x - h, at.pi));
    let dp_p = eval(State::new(at.x, at.pi + h));
    let dp_m = eval(State::new(at.x, at.pi - h));
    [
        [(dx_p.dx - dx_m.dx) / (2.0 * h), (dp_p.dx - dp_m.dx) / (2.0 * h)],
        [(dx_p.dpi - dx_m.dpi) / (2.0 * h), (dp_p.dpi - dp_m.dpi) / (2.0 * h)],
    ]
}

/// Newton's method on the field with a finite-difference Jacobian.
pub fn newton_root(field: &Field, guess: State) -> State {
    let mut s = guess;
    for _ in 0..100 {
        let v = field.eval(s).unwrap();
        if v.norm() < 1e-15 {
            break;
        }
        let j = fd_jacobian(field, s, 1e-7);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let step_x = (j[1][1] * v.dx - j[0][1] * v.dpi) / det;
        let step_pi = (-j[1][0] * v.dx + j[0][0] * v.dpi) / det;
        s = State::new(s.x - step_x, s.pi - step_pi);
    }
    s
}

/// Entrywise agreement relative to the entry, or to the matrix scale for
/// entries that vanish.
pub fn matrices_agree(a: &Matrix, b: &Matrix, rel: f64) -> bool {
    let scale = a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .all(|(x, y)| (x - y).abs() <= rel * x.abs().max(1e-3 * scale))
}
