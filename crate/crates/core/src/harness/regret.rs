//! Regret series and their growth diagnostics.

use crate::error::{OfwError, Result};

/// What the player's losses are compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparator<'a> {
    /// The comparator's loss in each round, e.g. `f_t(x*)` or `f*(x*)`.
    PerRound(&'a [f64]),
    /// `min_K Σ_{τ≤t} f_τ` for each prefix `t`.
    PerPrefix(&'a [f64]),
}

/// Cumulative regret after every round.
pub fn regret_of(losses: &[f64], comparator: Comparator<'_>) -> Result<Vec<f64>> {
    let c = match comparator {
        Comparator::PerRound(c) | Comparator::PerPrefix(c) => c,
    };
    if c.len() != losses.len() {
        return Err(OfwError::Input(format!("{} losses against {} comparator values", losses.len(), c.len())));
    }
    let mut out = Vec::with_capacity(losses.len());
    let (mut played, mut reference) = (0.0, 0.0);
    for (l, v) in losses.iter().zip(c) {
        played += l;
        match comparator {
            Comparator::PerRound(_) => reference += v,
            Comparator::PerPrefix(_) => reference = *v,
        }
        out.push(played - reference);
    }
    Ok(out)
}

/// Least-squares slope of `log R_t` against `log t` over
/// `t ∈ [from_frac · T, T]`, ignoring rounds with `R_t <= 0`.
pub fn tail_slope(series: &[f64], from_frac: f64) -> Result<f64> {
    let horizon = series.len();
    let start = ((from_frac * horizon as f64).ceil() as usize).max(1);
    let pts: Vec<(f64, f64)> = (start..=horizon)
        .filter(|&t| series[t - 1] > 0.0)
        .map(|t| ((t as f64).ln(), series[t - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return Err(OfwError::Input("fewer than two positive points in the tail".into()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
