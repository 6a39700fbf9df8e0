//! Independent checks of the closed forms: numerical root finding, finite
//! differences, matrix exponentials and randomized invariants.

mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use rand::Rng;
use wunklab_core::analysis::{classify, invariant_lines, nullclines, steady_state, Kind};
use wunklab_core::dynamics::{jacobian, Field, LinearSystem, Regime, State};
use wunklab_core::model::{check_wunk, check_wunk_statistics, derive};
use wunklab_core::scenarios::{
    integrate_backward, integrate_forward, multiplier, multiplier_limit, run_scenario, Scenario, Shock,
};
use wunklab_core::statics::{comparative_static, StaticShock, Verdict};
use wunklab_core::ParamId;

#[test]
fn closed_form_steady_states_match_newton() {
    let convex = p0()
        .with(ParamId::Eta, 1.0)
        .unwrap()
        .with(ParamId::MuW, 0.35)
        .unwrap();
    let cases = [
        (p0_nk().with(ParamId::Sigma, 0.13).unwrap(), Regime::Zlb, 0.0),
        (p0(), Regime::Zlb, 0.0),
        (p0(), Regime::NormalRule, 0.0),
        (convex, Regime::NormalRule, 0.02),
    ];
    for (p, regime, g) in cases {
        let closed = steady_state(&p, regime, g).unwrap();
        let field = Field::for_trajectories(&p, regime, g).unwrap();
        let guess = State::new(closed.x * 1.1, closed.pi + 0.01);
        let root = newton_root(&field, guess);
        assert!(root.distance(closed) < 1e-10, "{regime:?}: {root:?} vs {closed:?}");
    }
}

#[test]
fn derived_quantities_match_newton() {
    let p = p0();
    let d = derive(&p).unwrap();
    let field = Field::baseline(&p, Regime::NormalRule, 0.0).unwrap();
    let root = newton_root(&field, State::new(0.7, 0.01));
    assert_relative_eq!(root.x, d.y_n, max_relative = 1e-12);
    assert!(root.pi.abs() < 1e-12);
}

#[test]
fn convex_nonlinear_field_rests_at_natural_consumption() {
    let p = p0().with(ParamId::Eta, 1.0).unwrap();
    let field = Field::baseline(&p, Regime::NormalRule, 0.0).unwrap();
    let root = newton_root(&field, State::new(0.8, 0.01));
    assert_relative_eq!(root.x, 0.912871, epsilon = 1e-6);
    // Its Jacobian there matches the linearized system.
    let lin = Field::linearized_gov(&p, Regime::NormalRule, 0.0).unwrap();
    assert!(matrices_agree(&lin.jacobian_at(root), &fd_jacobian(&field, root, 1e-6), 1e-5));
}

#[test]
fn jacobians_match_finite_differences() {
    let mut rng = rng(11);
    for draw in 0..100 {
        let phi = rng.gen_range(0.0..3.0);
        let p = match draw % 4 {
            0 | 2 => draw_nk(&mut rng, phi),
            1 => draw_wunk(&mut rng, phi),
            _ => draw_wunk_convex(&mut rng, phi),
        };
        for regime in [Regime::NormalRule, Regime::Zlb] {
            let q = match (regime, p.mu_w() == 0.0) {
                (Regime::NormalRule, _) => p,
                (_, true) => with_nk_zlb(&p, &mut rng),
                (_, false) => with_permanent_zlb(&p, &mut rng),
            };
            let at = steady_state(&q, regime, 0.0).unwrap();
            let m = jacobian(&q, regime, at, 0.0).unwrap();
            let field = Field::for_trajectories(&q, regime, 0.0).unwrap();
            let fd = fd_jacobian(&field, at, 1e-6);
            assert!(matrices_agree(&m.matrix(), &fd, 1e-5), "{q:?} {regime:?}: {m:?} vs {fd:?}");
            assert_eq!(m.m22, q.delta());
            assert!(m.m21 < 0.0);
        }
    }
}

#[test]
fn backward_linear_flow_matches_matrix_exponential() {
    let p = p0_nk().with(ParamId::Sigma, 0.13).unwrap();
    let ss = steady_state(&p, Regime::Zlb, 0.0).unwrap();
    let sys = jacobian(&p, Regime::Zlb, ss, 0.0).unwrap();
    let terminal = State::new(p.y_natural(), 0.0);
    let tr = integrate_backward(&sys, terminal, 1.0, 1e-3, Regime::Zlb).unwrap();
    let m = sys.matrix();
    let back = expm(&[[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]]);
    let offset = mat_vec(&back, [terminal.x - ss.x, terminal.pi - ss.pi]);
    let expected = State::new(ss.x + offset[0], ss.pi + offset[1]);
    assert!(tr.initial().distance(expected) < 1e-8);
    assert_eq!(tr.terminal(), terminal);
}

#[test]
fn richardson_ratio_shows_fourth_order() {
    let p = p0_nk().with(ParamId::Sigma, 0.13).unwrap();
    let ss = steady_state(&p, Regime::Zlb, 0.0).unwrap();
    let sys = jacobian(&p, Regime::Zlb, ss, 0.0).unwrap();
    let end = State::new(p.y_natural(), 0.0);
    let y0 = |h: f64| integrate_backward(&sys, end, 8.0, h, Regime::Zlb).unwrap().initial().x;
    let (a, b, c) = (y0(0.8), y0(0.4), y0(0.2));
    let ratio = (a - b) / (b - c);
    assert!((ratio - 16.0).abs() < 0.2 * 16.0, "ratio {ratio}");
}

#[test]
fn nonlinear_round_trip_is_reversible() {
    let p = p0_nk().with(ParamId::Sigma, 0.13).unwrap();
    let f = Field::for_trajectories(&p, Regime::Zlb, 0.0).unwrap();
    let start = State::new(0.9, 0.01);
    let fwd = integrate_forward(&f, start, 1.0, 1e-3, Regime::Zlb).unwrap();
    let back = integrate_backward(&f, fwd.terminal(), 1.0, 1e-3, Regime::Zlb).unwrap();
    assert!(back.initial().distance(start) < 1e-9);
}

#[test]
fn nullclines_cross_at_random_steady_states() {
    let mut rng = rng(5);
    for _ in 0..200 {
        let phi = rng.gen_range(1.1..3.0);
        let p = with_permanent_zlb(&draw_wunk(&mut rng, phi), &mut rng);
        for regime in [Regime::NormalRule, Regime::Zlb] {
            let hit = nullclines(&p, regime, 0.0).unwrap().intersection().unwrap();
            let ss = steady_state(&p, regime, 0.0).unwrap();
            assert!(hit.distance(ss) < 1e-10);
        }
    }
}

#[test]
fn wunk_statistics_agree_with_structural_condition() {
    let mut rng = rng(3);
    let mut agree = 0;
    for _ in 0..1000 {
        let p = draw_base(&mut rng, 0.0, 1.5);
        let bound = p.phillips_slope();
        let p = p.with(ParamId::MuW, bound * rng.gen_range(0.0..2.0)).unwrap();
        let lambda = p.y_natural() * p.phillips_output_coeff();
        let stats = check_wunk_statistics(p.delta(), p.r_natural(), lambda).unwrap();
        assert_eq!(stats.holds, check_wunk(&p).holds, "{p:?}");
        agree += 1;
    }
    assert_eq!(agree, 1000);
}

#[test]
fn multiplier_tail_approaches_the_limit() {
    let p = p0()
        .with(ParamId::Eta, 1.0)
        .unwrap()
        .with(ParamId::MuW, 0.35)
        .unwrap();
    let limit = multiplier_limit(&p).unwrap();
    let gaps: Vec<f64> = [25.0, 50.0, 100.0, 200.0]
        .iter()
        .map(|&t| (multiplier(&p, t, 0.01, 0.002, 1e-2).unwrap() - limit).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    for t in [10.0, 50.0, 200.0] {
        assert!(multiplier(&p, t, 0.01, 0.002, 1e-2).unwrap() > 1.0);
    }
}

#[test]
fn nearly_linear_labor_has_unit_multiplier() {
    let p = p0().with(ParamId::Eta, 1e-6).unwrap();
    let m = multiplier(&p, 50.0, 0.01, 0.002, 1e-2).unwrap();
    assert!((m - 1.0).abs() < 1e-3);
    assert!((multiplier_limit(&p).unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn wunk_guidance_stays_below_the_peg_steady_state() {
    let p = p0();
    let shock = Shock::wealth(0.12);
    let phases = shock.phases(&p).unwrap();
    let f = steady_state(&phases.normal, Regime::Peg, 0.0).unwrap();
    for (t, delta) in [(4.0, 10.0), (16.0, 40.0), (8.0, 200.0)] {
        let tr = run_scenario(&p, &Scenario::forward_guidance(t, delta, shock), 1e-2).unwrap();
        let last = tr.samples.len() - 1;
        for s in &tr.samples[1..last] {
            assert!(s.state.x < f.x && s.state.pi < f.pi);
        }
    }
}

fn classify_at(p: &wunklab_core::ModelParams, regime: Regime) -> Kind {
    let at = steady_state(p, regime, 0.0).unwrap();
    classify(&jacobian(p, regime, at, 0.0).unwrap()).unwrap().kind
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classification_matches_trace_and_determinant(
        m11 in -1.0f64..1.0, m12 in -1.0f64..1.0, m21 in -1.0f64..1.0, m22 in -1.0f64..1.0,
    ) {
        let sys = LinearSystem::from_matrix([[m11, m12], [m21, m22]], State::new(0.0, 0.0));
        if let Ok(c) = classify(&sys) {
            prop_assert_eq!(c.kind == Kind::Saddle, c.det < 0.0);
            let sum = c.eigenvalues[0] + c.eigenvalues[1];
            let prod = c.eigenvalues[0] * c.eigenvalues[1];
            prop_assert!((sum.re - c.trace).abs() <= 1e-10 * c.trace.abs().max(1e-3));
            prop_assert!((prod.re - c.det).abs() <= 1e-10 * c.det.abs());
            for pair in &c.eigenpairs {
                let v = pair.vector;
                let r = [
                    m11 * v[0] + m12 * v[1] - pair.value * v[0],
                    m21 * v[0] + m22 * v[1] - pair.value * v[1],
                ];
                prop_assert!(r[0].hypot(r[1]) <= 1e-10 * sys.norm());
            }
            if let Ok(lines) = invariant_lines(&sys) {
                prop_assert_eq!(lines.stable.len() + lines.unstable.len(), 2);
            }
        }
    }

    #[test]
    fn propositions_hold_on_random_draws(seed in any::<u64>(), phi in 0.0f64..3.0) {
        prop_assume!((phi - 1.0).abs() > 1e-3);
        let mut rng = rng(seed);
        let nk = draw_nk(&mut rng, phi);
        let wunk = draw_wunk(&mut rng, phi);
        let nk_normal = classify_at(&nk, Regime::NormalRule);
        prop_assert_eq!(nk_normal == Kind::Saddle, phi < 1.0);
        prop_assert!(classify_at(&wunk, Regime::NormalRule).is_source());
        prop_assert_eq!(classify_at(&with_nk_zlb(&nk, &mut rng), Regime::Zlb), Kind::Saddle);
        let wz = with_permanent_zlb(&wunk, &mut rng);
        prop_assert_eq!(classify_at(&wz, Regime::Zlb), Kind::NodalSource);
        let z = steady_state(&wz, Regime::Zlb, 0.0).unwrap();
        prop_assert!(z.x < wz.y_natural() && z.pi < 0.0);
        let nz = with_nk_zlb(&nk, &mut rng);
        let z = steady_state(&nz, Regime::Zlb, 0.0).unwrap();
        prop_assert!(z.x > nz.y_natural() && z.pi > 0.0);
    }

    #[test]
    fn steady_states_zero_the_field(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = with_permanent_zlb(&draw_wunk(&mut rng, 1.5), &mut rng);
        for regime in [Regime::NormalRule, Regime::Zlb, Regime::Peg] {
            let s = steady_state(&p, regime, 0.0).unwrap();
            let v = Field::for_trajectories(&p, regime, 0.0).unwrap().eval(s).unwrap();
            prop_assert!(v.dx.abs() < 1e-12 && v.dpi.abs() < 1e-12, "{:?}", v);
        }
    }

    #[test]
    fn paradox_signs_hold_on_random_draws(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = with_permanent_zlb(&draw_wunk(&mut rng, 1.5), &mut rng);
        for shock in [StaticShock::Thrift, StaticShock::Toil, StaticShock::Technology, StaticShock::Flexibility] {
            let r = comparative_static(&p, shock, 1e-6).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Holds);
            prop_assert!(r.max_relative_gap() < 1e-6, "{:?}", r);
        }
        let q = with_permanent_zlb(&draw_wunk_convex(&mut rng, 1.5), &mut rng);
        let r = comparative_static(&q, StaticShock::Spending { g: 0.01 }, 1e-6).unwrap();
        prop_assert!((r.output_response - multiplier_limit(&q).unwrap()).abs() < 1e-9);
        prop_assert!(r.output_response > 1.0);
    }

    #[test]
    fn derive_is_deterministic(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = draw_wunk(&mut rng, 1.5);
        let (a, b) = (derive(&p).unwrap(), derive(&p).unwrap());
        prop_assert_eq!(a.y_n.to_bits(), b.y_n.to_bits());
        prop_assert_eq!(a.r_n.to_bits(), b.r_n.to_bits());
        prop_assert_eq!(a.c_n, a.y_n);
        let report = check_wunk(&p);
        prop_assert!(report.holds && p.phillips_slope() < p.mu_w());
    }
}
