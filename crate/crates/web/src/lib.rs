//! Browser bindings for the relay-routing library.
//!
//! Each exported function has a plain Rust twin in [`demo`] that native tests
//! exercise; the wasm wrappers only convert errors.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Hop-distance density sampled at `points` evenly spaced distances.
/// Returns interleaved `[rho0, f0, rho1, f1, ...]`.
#[wasm_bindgen]
pub fn distance_pdf(kind: &str, density: f64, separation: f64, points: usize) -> Result<Vec<f64>, JsError> {
    demo::distance_pdf(kind, density, separation, points).map_err(js)
}

/// For each power in dBm: `[ideal_hops, ideal_bps, stepwise_hops, analytic_bps]`.
#[wasm_bindgen]
pub fn throughput_curve(band: &str, density: f64, distance: f64, powers_dbm: Vec<f64>) -> Result<Vec<f64>, JsError> {
    demo::throughput_curve(band, density, distance, &powers_dbm).map_err(js)
}

/// Row-major coverage probabilities, one row per distance.
#[wasm_bindgen]
pub fn coverage_map(
    band: &str,
    density: f64,
    rf_gamma_db: f64,
    distances: Vec<f64>,
    powers_dbm: Vec<f64>,
) -> Result<Vec<f64>, JsError> {
    demo::coverage_map(band, density, rf_gamma_db, &distances, &powers_dbm).map_err(js)
}
