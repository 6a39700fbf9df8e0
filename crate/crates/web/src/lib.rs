//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Everything crosses the boundary as JSON strings. The `*_json` functions
//! are plain Rust so they can be tested natively; the exported wrappers only
//! turn errors into JavaScript exceptions.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;
use wunklab_core::analysis::{
    classify, invariant_lines, nullclines, phase_field, steady_state, GridSpec,
};
use wunklab_core::dynamics::{jacobian, Regime};
use wunklab_core::model::check_wunk;
use wunklab_core::scenarios::{run_scenario, Scenario};
use wunklab_core::ModelParams;

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))
}

fn regime(name: &str) -> Result<Regime, String> {
    name.parse()
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Vector field on a grid, as parallel arrays.
pub fn phase_field_json(params: &str, regime_name: &str, g: f64, grid: &str) -> Result<String, String> {
    let p: ModelParams = parse("params", params)?;
    let grid: GridSpec = parse("grid", grid)?;
    let samples = phase_field(&p, regime(regime_name)?, g, &grid).map_err(|e| e.to_string())?;
    let pick = |f: fn(&wunklab_core::analysis::FieldSample) -> f64| samples.iter().map(f).collect::<Vec<_>>();
    Ok(to_json(&json!({
        "x": pick(|s| s.state.x),
        "pi": pick(|s| s.state.pi),
        "dx": pick(|s| s.velocity.dx),
        "dpi": pick(|s| s.velocity.dpi),
    })))
}

/// Steady state, classification, invariant lines and nullclines of one regime.
pub fn analyze_json(params: &str, regime_name: &str, g: f64) -> Result<String, String> {
    let p: ModelParams = parse("params", params)?;
    let r = regime(regime_name)?;
    let at = steady_state(&p, r, g).map_err(|e| e.to_string())?;
    let system = jacobian(&p, r, at, g).map_err(|e| e.to_string())?;
    let class = classify(&system).map_err(|e| e.to_string())?;
    Ok(to_json(&json!({
        "variant": p.variant(),
        "wunk": check_wunk(&p),
        "steady_state": at,
        "classification": class,
        "invariant_lines": invariant_lines(&system).ok(),
        "nullclines": nullclines(&p, r, g).ok(),
    })))
}

/// Solves a scenario and returns every `thin`-th sample as parallel arrays.
pub fn trajectory_json(params: &str, scenario: &str, step: f64, thin: usize) -> Result<String, String> {
    let p: ModelParams = parse("params", params)?;
    let s: Scenario = parse("scenario", scenario)?;
    let tr = run_scenario(&p, &s, step).map_err(|e| e.to_string())?.thinned(thin.max(1));
    Ok(to_json(&json!({
        "t": tr.samples.iter().map(|s| s.t).collect::<Vec<_>>(),
        "x": tr.samples.iter().map(|s| s.state.x).collect::<Vec<_>>(),
        "pi": tr.samples.iter().map(|s| s.state.pi).collect::<Vec<_>>(),
        "regime": tr.samples.iter().map(|s| s.regime.name()).collect::<Vec<_>>(),
        "natural": { "x": p.c_natural(), "pi": 0.0 },
    })))
}

#[wasm_bindgen(js_name = phaseField)]
pub fn phase_field_js(params: &str, regime_name: &str, g: f64, grid: &str) -> Result<String, JsError> {
    phase_field_json(params, regime_name, g, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze(params: &str, regime_name: &str, g: f64) -> Result<String, JsError> {
    analyze_json(params, regime_name, g).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn trajectory(params: &str, scenario: &str, step: f64, thin: usize) -> Result<String, JsError> {
    trajectory_json(params, scenario, step, thin).map_err(|e| JsError::new(&e))
}
