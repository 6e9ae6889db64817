//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Results cross the boundary as JSON strings; errors become thrown JS strings.

use mtlab::bubble::BubbleProfile;
use mtlab::design::{search_design, SearchParams};
use mtlab::mt::mt_constants;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// `{"s","n","a","alpha"}` for the sharp constants a_{s,n}, α_{s,n}.
#[wasm_bindgen]
pub fn constants(s: u32, n: u32) -> Result<String, JsValue> {
    let c = mt_constants(s, n).map_err(js_err)?;
    Ok(json!({ "s": c.s, "n": c.n, "a": c.a, "alpha": c.alpha }).to_string())
}

/// Samples φ on [0, 2.5δ]: returns t₀, φ(t₀), t₁, φ(t₁), …
#[wasm_bindgen]
pub fn profile_curve(n: usize, delta: f64, eps: f64, b: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    let p = BubbleProfile::new(n, eps, delta, b).map_err(js_err)?;
    let samples = samples.max(2);
    let end = 2.5 * delta;
    let mut out = Vec::with_capacity(2 * samples);
    for k in 0..samples {
        let t = end * k as f64 / (samples - 1) as f64;
        out.push(t);
        out.push(p.phi(t));
    }
    Ok(out)
}

/// Runs the multi-start design search; the JSON carries the best design,
/// whether it is valid, and every start's residual.
#[wasm_bindgen]
pub fn search(n: usize, m: u32, count: usize, seeds: usize, seed: u32) -> Result<String, JsValue> {
    let params = SearchParams { n, m, count, seeds, iters: 200, rng_seed: u64::from(seed) };
    let out = search_design(&params).map_err(js_err)?;
    Ok(json!({
        "design": out.design.to_file(),
        "valid": out.valid,
        "best_seed": out.best_seed,
        "seed_residuals": out.seed_residuals,
    })
    .to_string())
}
