//! Browser bindings for exploring measurement reliability.
//!
//! Each exported operation returns a JSON string so the page can stay free of
//! any framework. The `*_json` functions hold the logic and are ordinary Rust,
//! which keeps them testable off the browser.

use qmeter_core::calibration::{classical_prediction, estimate_channel, exact_channel, interference_gap};
use qmeter_core::device::{mhi_reliability, pointer_distribution, showcase};
use qmeter_core::info::analyze;
use qmeter_core::interpretation::pointer_misalignment;
use qmeter_core::tolerance::{DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_EPSILON_BITS};
use qmeter_core::PureState;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest shot count the page may request; keeps the tab responsive.
pub const MAX_SHOTS: u64 = 2_000_000;

/// Reliability, equivocation and noise of the binary symmetric device over
/// `points` evenly spaced crossover values in `[0, 1/2]`.
pub fn reliability_curve_json(points: usize) -> Result<String, String> {
    if points < 2 {
        return Err("at least two points are needed".into());
    }
    let mut q = Vec::with_capacity(points);
    let mut reliability = Vec::with_capacity(points);
    let mut equivocation = Vec::with_capacity(points);
    let mut noise = Vec::with_capacity(points);
    for t in 0..points {
        let qt = 0.5 * t as f64 / (points - 1) as f64;
        let dev = showcase::symmetric_imperfect(qt).map_err(|e| e.to_string())?;
        let report = analyze(&dev, DEFAULT_EPSILON, DEFAULT_EPSILON_BITS).map_err(|e| e.to_string())?;
        q.push(qt);
        reliability.push(report.reliability);
        equivocation.push(report.equivocation);
        noise.push(report.noise);
    }
    Ok(json!({ "q": q, "reliability": reliability, "equivocation": equivocation, "noise": noise })
        .to_string())
}

/// Feeds `cos(phi)|a0> + sin(phi)|a1>` into the interference device with
/// crossover `q` and contrasts the quantum pointer distribution with the
/// prediction obtained by mixing calibrated channel rows.
pub fn explore_interference_json(q: f64, phi: f64) -> Result<String, String> {
    let run = || -> qmeter_core::Result<serde_json::Value> {
        let dev = showcase::interference(q)?;
        let input = PureState::from_real(&[phi.cos(), phi.sin()])?;
        let state = dev.apply(&input)?;
        let channel = exact_channel(&dev)?;
        let classical = classical_prediction(&channel, &input.probabilities())?;
        let mhi = mhi_reliability(&state, DEFAULT_DELTA)?;
        let misalignment = pointer_misalignment(&state);
        Ok(json!({
            "input": input.probabilities(),
            "quantum": pointer_distribution(&state),
            "classical": classical,
            "gap": interference_gap(&dev, &input)?,
            "mhi": mhi,
            "misalignment": misalignment.value,
            "degenerate": misalignment.degenerate,
        }))
    };
    run().map(|v| v.to_string()).map_err(|e| e.to_string())
}

/// Estimates the binary symmetric channel with crossover `q` from `shots`
/// simulated measurements per input.
pub fn calibrate_json(q: f64, shots: u64, seed: u64) -> Result<String, String> {
    if shots == 0 || shots > MAX_SHOTS {
        return Err(format!("shots must be between 1 and {MAX_SHOTS}"));
    }
    let dev = showcase::symmetric_imperfect(q).map_err(|e| e.to_string())?;
    let report = estimate_channel(&dev, shots, seed).map_err(|e| e.to_string())?;
    Ok(json!({
        "exact": report.exact.probs,
        "estimated": report.estimated.probs,
        "max_abs_error": report.max_abs_error,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn reliability_curve(points: usize) -> Result<String, JsError> {
    reliability_curve_json(points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn explore_interference(q: f64, phi: f64) -> Result<String, JsError> {
    explore_interference_json(q, phi).map_err(|e| JsError::new(&e))
}

/// `seed` arrives as a JS number; fractional parts are dropped.
#[wasm_bindgen]
pub fn calibrate(q: f64, shots: u32, seed: f64) -> Result<String, JsError> {
    calibrate_json(q, u64::from(shots), seed.max(0.0) as u64).map_err(|e| JsError::new(&e))
}
