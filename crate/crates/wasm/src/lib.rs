//! Browser bindings. Every export returns a JSON string so the page can
//! `JSON.parse` it; errors surface as thrown JS exceptions.
//!
//! The `*_json` functions hold the logic and run natively in tests.

use lognet_core::records::{BuildLayerRecord, FlowRecord, GeneratorChoice, MobiusRecord};
use lognet_core::{integrate, pipeline_trace, to_natural, ActivationMode, SourceParams};
use wasm_bindgen::prelude::*;

/// Upper bound on flow samples sent to the page.
pub const MAX_FLOW_STEPS: f64 = 100_000.0;

pub fn build_layer_json(mu: f64, sigma: f64, mode: &str) -> Result<String, String> {
    let mode: ActivationMode = mode.parse().map_err(|e| format!("{e}"))?;
    let p = SourceParams::new(mu, sigma).map_err(|e| e.to_string())?;
    let run = pipeline_trace(p, mode).map_err(|e| e.to_string())?;
    let rec = BuildLayerRecord::from_run(&run).map_err(|e| e.to_string())?;
    serde_json::to_string(&rec).map_err(|e| e.to_string())
}

pub fn flow_json(mu: f64, sigma: f64, step: f64, t_end: f64) -> Result<String, String> {
    if step > 0.0 && t_end / step > MAX_FLOW_STEPS {
        return Err(format!("t_end / step exceeds {MAX_FLOW_STEPS}"));
    }
    let p = SourceParams::new(mu, sigma).map_err(|e| e.to_string())?;
    let theta = to_natural(p).map_err(|e| e.to_string())?;
    lognet_core::to_phase(theta).map_err(|e| e.to_string())?;
    let tr = integrate(theta, step, t_end).map_err(|e| e.to_string())?;
    let rec = FlowRecord::from_trajectory(&tr).map_err(|e| e.to_string())?;
    serde_json::to_string(&rec).map_err(|e| e.to_string())
}

pub fn mobius_json(mu: f64, sigma: f64, generator: &str) -> Result<String, String> {
    let choice: GeneratorChoice = generator.parse().map_err(|e| format!("{e}"))?;
    let p = SourceParams::new(mu, sigma).map_err(|e| e.to_string())?;
    let run = pipeline_trace(p, ActivationMode::Paper).map_err(|e| e.to_string())?;
    let rec = MobiusRecord::from_run(&run, choice).map_err(|e| e.to_string())?;
    serde_json::to_string(&rec).map_err(|e| e.to_string())
}

/// Layer record for `(mu, sigma)`; `mode` is `"paper"` or `"exp"`.
#[wasm_bindgen(js_name = buildLayer)]
pub fn build_layer(mu: f64, sigma: f64, mode: &str) -> Result<String, JsError> {
    build_layer_json(mu, sigma, mode).map_err(|e| JsError::new(&e))
}

/// RK4 trajectory of the gradient flow.
#[wasm_bindgen]
pub fn flow(mu: f64, sigma: f64, step: f64, t_end: f64) -> Result<String, JsError> {
    flow_json(mu, sigma, step, t_end).map_err(|e| JsError::new(&e))
}

/// Action of `g1`, `g2`, `g1inv` or `g2inv` on the embedded point.
#[wasm_bindgen]
pub fn mobius(mu: f64, sigma: f64, generator: &str) -> Result<String, JsError> {
    mobius_json(mu, sigma, generator).map_err(|e| JsError::new(&e))
}
