//! Three views of the `ofw` crate for a browser page: adversarial regret of
//! OFW against OGD, the ball-smoothed absolute value, and the loss curves of
//! the matrix-completion benchmark.

use wasm_bindgen::prelude::*;

use ofw::baselines::{ogd_run, OgdConfig};
use ofw::bench::{planted_ratings, run_cf_compare, BenchConfig};
use ofw::engine::{BallMarginal, EngineOptions};
use ofw::error::Result;
use ofw::harness::{empirical_regret, gen_stream, score_ofw, RegretMode, StreamKind, StreamSpec};
use ofw::oracles::DomainSpec;
use ofw::schedule::Setting;

fn js(e: ofw::error::OfwError) -> JsError {
    JsError::new(&e.to_string())
}

/// Cumulative regret of OFW followed by that of OGD, `horizon` values each.
pub fn regret_series(domain: &str, pattern: &str, dim: usize, horizon: usize, seed: u64) -> Result<Vec<f64>> {
    let domain = match domain {
        "ball" => DomainSpec::ball(dim, 1.0)?,
        _ => DomainSpec::simplex(dim)?,
    };
    let spec = StreamSpec { kind: StreamKind::LinearAdversarial { pattern: pattern.parse()?, scale: 1.0 }, horizon, seed };
    let stream = gen_stream(&spec, &domain)?;
    let engine = EngineOptions { seed, ..EngineOptions::default() };
    let ofw = score_ofw(&domain, &stream, Setting::Adversarial, horizon, engine, RegretMode::Empirical)?;
    let ogd = ogd_run(&domain, &stream.events, &OgdConfig::standard(&domain, &stream.meta)?, horizon)?;
    let (ogd_regret, _) = empirical_regret(&domain, &stream, &ogd.trace.losses())?;
    let mut out = ofw.regret;
    out.extend(ogd_regret);
    Ok(out)
}

/// `z`, `|z|`, the smoothed value and its slope on `points` samples of
/// `[-2δ, 2δ]`, concatenated.
pub fn smoothing_profile(dim: usize, delta: f64, points: usize) -> Result<Vec<f64>> {
    let m = BallMarginal::new(dim)?;
    let zs: Vec<f64> = (0..points).map(|k| -2.0 * delta + 4.0 * delta * k as f64 / (points.max(2) - 1) as f64).collect();
    let mut out = zs.clone();
    out.extend(zs.iter().map(|z| z.abs()));
    out.extend(zs.iter().map(|&z| m.smoothed_abs(z, delta)));
    out.extend(zs.iter().map(|&z| m.smoothed_abs_slope(z, delta)));
    Ok(out)
}

/// Windowed mean squared loss of OFW followed by OGD on a planted low-rank
/// ratings stream, with the planted trace norm as the bound.
pub fn completion_losses(rows: usize, cols: usize, rank: usize, horizon: usize, seed: u64) -> Result<Vec<f64>> {
    let (records, planted) = planted_ratings(rows, cols, rank, 0.0, horizon, seed)?;
    let mut config = BenchConfig::new(rows, cols, planted.trace_norm()?, horizon);
    config.seed = seed;
    let out = run_cf_compare(&config, &records)?;
    let mut losses = out.summary.ofw_window_losses;
    losses.extend(out.summary.ogd_window_losses);
    Ok(losses)
}

#[wasm_bindgen(js_name = regretSeries)]
pub fn regret_series_js(domain: &str, pattern: &str, dim: usize, horizon: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    regret_series(domain, pattern, dim, horizon, seed as u64).map_err(js)
}

#[wasm_bindgen(js_name = smoothingProfile)]
pub fn smoothing_profile_js(dim: usize, delta: f64, points: usize) -> Result<Vec<f64>, JsError> {
    smoothing_profile(dim, delta, points).map_err(js)
}

#[wasm_bindgen(js_name = completionLosses)]
pub fn completion_losses_js(rows: usize, cols: usize, rank: usize, horizon: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    completion_losses(rows, cols, rank, horizon, seed as u64).map_err(js)
}
