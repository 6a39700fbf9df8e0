//! One function per subcommand. Each writes its artifacts and returns a
//! JSON summary for stdout.

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde_json::{json, Value};
use wunklab_core::analysis::{
    classify, invariant_lines, nullclines, phase_field, phase_field_csv, steady_state,
};
use wunklab_core::discrete::{continuous_loglin_matrix, loglin_coeffs, one_step_map};
use wunklab_core::dynamics::jacobian;
use wunklab_core::model::{check_wunk, Variant};
use wunklab_core::output::fmt_f64;
use wunklab_core::scenarios::{
    guidance_threshold_nk, run_scenario, spending_threshold_nk, zlb_threshold_wunk, Scenario,
};
use wunklab_core::statics::comparative_static;
use wunklab_core::{ModelParams, ParamId};

use crate::artifacts::Artifacts;
use crate::config::RunConfig;
use crate::error::CliError;

pub fn run(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let scenario = cfg.scenario()?;
    let trajectory = run_scenario(&cfg.params, &scenario, cfg.numerics.step)?;
    out.csv("trajectory.csv", &trajectory.thinned(cfg.numerics.thin).to_csv())?;
    let summary = json!({
        "scenario": scenario,
        "step": trajectory.step,
        "samples": trajectory.samples.len(),
        "initial": trajectory.initial(),
        "terminal": trajectory.terminal(),
    });
    out.json("summary.json", &summary)?;
    Ok(summary)
}

/// What a sweep varies.
#[derive(Debug, Clone, Copy)]
enum Knob {
    Duration,
    Guidance,
    Spending,
    Param(ParamId),
}

impl Knob {
    fn parse(name: &str) -> Result<Knob, CliError> {
        match name {
            "T" => Ok(Knob::Duration),
            "Delta" => Ok(Knob::Guidance),
            "g" => Ok(Knob::Spending),
            other => ParamId::ALL
                .into_iter()
                .find(|id| id.name() == other)
                .map(Knob::Param)
                .ok_or_else(|| CliError::Config {
                    key: "sweep.parameter".into(),
                    reason: format!("unknown parameter `{other}` (expected T, Delta, g or a model parameter)"),
                }),
        }
    }

    fn apply(
        self,
        p: &ModelParams,
        s: &Scenario,
        v: f64,
    ) -> wunklab_core::Result<(ModelParams, Scenario)> {
        Ok(match self {
            Knob::Duration => (*p, Scenario { duration: v, ..*s }),
            Knob::Guidance => (*p, Scenario { guidance: v, ..*s }),
            Knob::Spending => (*p, Scenario { g: v, ..*s }),
            Knob::Param(id) => (p.with(id, v)?, *s),
        })
    }
}

fn thread_cap() -> Result<usize, CliError> {
    match std::env::var("WUNKLAB_THREADS") {
        Err(_) => Ok(0),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config {
                key: "WUNKLAB_THREADS".into(),
                reason: format!("`{text}` is not a positive integer"),
            }),
        },
    }
}

pub fn sweep(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let sweep = cfg.sweep()?;
    let scenario = cfg.scenario()?;
    let knob = Knob::parse(&sweep.parameter)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap()?)
        .build()
        .map_err(|e| CliError::Config {
            key: "WUNKLAB_THREADS".into(),
            reason: e.to_string(),
        })?;
    let step = cfg.numerics.step;
    let results: Vec<_> = pool.install(|| {
        sweep
            .values
            .par_iter()
            .map(|&v| {
                knob.apply(&cfg.params, &scenario, v)
                    .and_then(|(p, s)| run_scenario(&p, &s, step))
                    .map(|t| t.initial())
            })
            .collect()
    });

    let mut csv = String::from("value,x0,pi0,status\n");
    let mut failures = 0;
    for (&v, r) in sweep.values.iter().zip(&results) {
        let (x, pi, status) = match r {
            Ok(s) => (s.x, s.pi, "ok".to_string()),
            Err(e) => {
                failures += 1;
                let kind = CliError::Model(e.clone()).diagnostic()["error"].clone();
                (f64::NAN, f64::NAN, kind.as_str().unwrap_or("error").to_string())
            }
        };
        csv.push_str(&format!("{},{},{},{status}\n", fmt_f64(v), fmt_f64(x), fmt_f64(pi)));
    }
    out.csv("sweep.csv", &csv)?;
    let summary = json!({
        "parameter": sweep.parameter,
        "points": sweep.values.len(),
        "failures": failures,
        "step": step,
    });
    out.json("sweep.json", &summary)?;
    Ok(summary)
}

pub fn classify_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let (p, a) = (&cfg.params, cfg.analysis);
    let at = steady_state(p, a.regime, a.g)?;
    let system = jacobian(p, a.regime, at, a.g)?;
    let class = classify(&system)?;
    let lines = invariant_lines(&system).ok();
    let summary = json!({
        "regime": a.regime,
        "g": a.g,
        "variant": p.variant(),
        "steady_state": at,
        "jacobian": system.matrix(),
        "classification": class,
        "invariant_lines": lines,
    });
    out.json("classification.json", &summary)?;
    Ok(summary)
}

pub fn nullclines_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let a = cfg.analysis;
    let lines = nullclines(&cfg.params, a.regime, a.g)?;
    out.csv("nullclines.csv", &lines.to_csv())?;
    let summary = json!({
        "regime": a.regime,
        "g": a.g,
        "nullclines": lines,
        "intersection": lines.intersection(),
    });
    out.json("nullclines.json", &summary)?;
    Ok(summary)
}

pub fn phase_field_cmd(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let a = cfg.analysis;
    let grid = cfg.grid()?;
    let samples = phase_field(&cfg.params, a.regime, a.g, &grid)?;
    out.csv("phase_field.csv", &phase_field_csv(&samples))?;
    let summary = json!({ "regime": a.regime, "g": a.g, "grid": grid, "points": samples.len() });
    out.json("phase_field.json", &summary)?;
    Ok(summary)
}

pub fn thresholds(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let p = &cfg.params;
    let n = cfg.numerics;
    let shock = cfg.scenario()?.shock();
    let summary = match p.variant() {
        Variant::Nk => {
            let guidance = guidance_threshold_nk(p, &shock, n.tol, n.step)?;
            let spending = if p.eta() > 0.0 {
                Some(spending_threshold_nk(p, &shock, n.tol)?)
            } else {
                None
            };
            json!({ "variant": "nk", "guidance": guidance, "spending": spending })
        }
        _ => {
            let report = zlb_threshold_wunk(p, &shock, n.delta_max, n.guidance_grid, n.tol, n.step)?;
            let mut csv = String::from("delta,t_hat\n");
            for row in &report.rows {
                csv.push_str(&format!("{},{}\n", fmt_f64(row.delta), fmt_f64(row.t_hat)));
            }
            out.csv("guidance_rows.csv", &csv)?;
            json!({ "variant": p.variant(), "zlb_threshold": report })
        }
    };
    out.json("thresholds.json", &summary)?;
    Ok(summary)
}

pub fn statics(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let shock = cfg.statics.ok_or_else(|| CliError::Config {
        key: "statics".into(),
        reason: "this subcommand needs a statics section, e.g. {\"kind\": \"thrift\"}".into(),
    })?;
    let report = comparative_static(&cfg.params, shock, cfg.numerics.fd_step)?;
    let summary = serde_json::to_value(report).expect("serializable report");
    out.json("statics.json", &summary)?;
    Ok(summary)
}

pub fn check_wunk_cmd(cfg: &RunConfig) -> Result<Value, CliError> {
    Ok(serde_json::to_value(check_wunk(&cfg.params)).expect("serializable report"))
}

/// Period lengths for the discrete-to-continuous convergence table.
const DISCRETE_DTS: [f64; 6] = [0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625];

pub fn discrete_check(cfg: &RunConfig, out: &mut Artifacts) -> Result<Value, CliError> {
    let p = &cfg.params;
    let coeffs = loglin_coeffs(p);
    let a = continuous_loglin_matrix(p);
    let a = Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]);

    let mut errors = Vec::with_capacity(DISCRETE_DTS.len());
    for dt in DISCRETE_DTS {
        let b = one_step_map(p, dt)?;
        let b = Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1]);
        let exact = (a * dt).exp();
        errors.push((b - exact).abs().max());
    }
    let mut csv = String::from("dt,max_abs_error,ratio\n");
    let mut rows = Vec::new();
    for (i, (&dt, &err)) in DISCRETE_DTS.iter().zip(&errors).enumerate() {
        let ratio = if i == 0 { f64::NAN } else { errors[i - 1] / err };
        csv.push_str(&format!("{},{},{}\n", fmt_f64(dt), fmt_f64(err), fmt_f64(ratio)));
        rows.push(json!({ "dt": dt, "max_abs_error": err, "ratio": (i > 0).then_some(ratio) }));
    }
    out.csv("discrete_check.csv", &csv)?;
    let last = errors.len() - 1;
    let order = (errors[last - 1] / errors[last]).log2();
    let summary = json!({
        "alpha": coeffs.alpha,
        "phillips_coeff": coeffs.phillips_coeff,
        "rows": rows,
        "observed_order": order,
    });
    out.json("discrete_check.json", &summary)?;
    Ok(summary)
}
