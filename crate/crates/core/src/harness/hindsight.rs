//! Best fixed point in hindsight for a finite stream.

use crate::engine::{CostEvent, CostFamily};
use crate::error::{OfwError, Result};
use crate::iterate::Shape;
use crate::oracles::{DomainSpec, Gradient, LmoOptions};

/// Minimizer of `F_T = (1/T) Σ f_t` over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Hindsight {
    pub point: Vec<f64>,
    /// `F_T(point)`
    pub value: f64,
    /// `value - gap` is a lower bound on `min_K F_T`; zero for closed forms.
    pub gap: f64,
}

impl Hindsight {
    pub fn lower_bound(&self) -> f64 {
        self.value - self.gap
    }
}

fn cols_of(domain: &DomainSpec) -> usize {
    match domain.shape() {
        Shape::Matrix(_, n) => n,
        Shape::Vector(_) => 0,
    }
}

/// `F_T(x)`
pub fn average_value(events: &[CostEvent], x: &[f64], cols: usize) -> Result<f64> {
    let mut acc = 0.0;
    for e in events {
        acc += e.value(x, cols)?;
    }
    Ok(acc / events.len() as f64)
}

fn average_subgradient(events: &[CostEvent], x: &[f64], cols: usize) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; x.len()];
    for e in events {
        match e {
            CostEvent::MatrixEntry { i, j, rating } => acc[i * cols + j] += 2.0 * (x[i * cols + j] - rating),
            _ => acc.iter_mut().zip(e.subgradient(x, cols)?).for_each(|(a, g)| *a += g),
        }
    }
    let t = events.len() as f64;
    acc.iter_mut().for_each(|a| *a /= t);
    Ok(acc)
}

fn mean_payload(events: &[CostEvent], dim: usize) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for e in events {
        if let CostEvent::Quadratic { target: p } | CostEvent::Linear { g: p } = e {
            mean.iter_mut().zip(p).for_each(|(m, x)| *m += x);
        }
    }
    let t = events.len() as f64;
    mean.iter_mut().for_each(|m| *m /= t);
    mean
}

/// `argmin_K F_T`. Closed forms: quadratic on balls and simplices
/// (projection of the mean target) and linear on vector domains (oracle on
/// the mean). Everything else runs `iters` offline Frank-Wolfe steps with
/// step `2 / (k + 2)` and reports the best iterate with a gap certificate.
pub fn best_in_hindsight(domain: &DomainSpec, events: &[CostEvent], iters: usize) -> Result<Hindsight> {
    let family = events.first().ok_or_else(|| OfwError::Input("empty stream".into()))?.family();
    if events.iter().any(|e| e.family() != family) {
        return Err(OfwError::Input("stream mixes cost families".into()));
    }
    let dim = domain.dim();
    let cols = cols_of(domain);
    let projectable = matches!(domain, DomainSpec::Ball { .. } | DomainSpec::Simplex { .. });
    let vector = matches!(domain.shape(), Shape::Vector(_));
    match family {
        CostFamily::Quadratic if projectable => {
            let point = domain.project(&mean_payload(events, dim))?;
            let value = average_value(events, &point, cols)?;
            Ok(Hindsight { point, value, gap: 0.0 })
        }
        CostFamily::Linear if vector => {
            let point = domain.lmo(&Gradient::Dense(mean_payload(events, dim)), &LmoOptions::default())?.atom.to_dense();
            let value = average_value(events, &point, cols)?;
            Ok(Hindsight { point, value, gap: 0.0 })
        }
        _ => offline_frank_wolfe(domain, events, iters, cols),
    }
}

fn offline_frank_wolfe(domain: &DomainSpec, events: &[CostEvent], iters: usize, cols: usize) -> Result<Hindsight> {
    let opts = LmoOptions::default();
    let mut x = domain.initial_atom(&opts)?.to_dense();
    let mut best = (x.clone(), f64::INFINITY);
    let mut lower = f64::NEG_INFINITY;
    for k in 0..=iters {
        let value = average_value(events, &x, cols)?;
        let g = average_subgradient(events, &x, cols)?;
        let v = domain.lmo(&Gradient::Dense(g.clone()), &LmoOptions { seed: k as u64, ..opts })?.atom.to_dense();
        let gap: f64 = g.iter().zip(x.iter().zip(&v)).map(|(gi, (xi, vi))| gi * (xi - vi)).sum();
        lower = lower.max(value - gap.max(0.0));
        if value < best.1 {
            best = (x.clone(), value);
        }
        if k == iters {
            break;
        }
        let step = 2.0 / (k as f64 + 2.0);
        x.iter_mut().zip(&v).for_each(|(xi, vi)| *xi += step * (vi - *xi));
    }
    let (point, value) = best;
    Ok(Hindsight { point, value, gap: (value - lower).max(0.0) })
}

/// `min_K Σ_{τ≤t} f_τ` for every prefix `t`, for the closed-form families.
pub fn prefix_minima(domain: &DomainSpec, events: &[CostEvent]) -> Result<Vec<f64>> {
    let dim = domain.dim();
    let projectable = matches!(domain, DomainSpec::Ball { .. } | DomainSpec::Simplex { .. });
    let mut sum = vec![0.0; dim];
    let mut sq = 0.0;
    let mut out = Vec::with_capacity(events.len());
    for (k, e) in events.iter().enumerate() {
        let t = (k + 1) as f64;
        match e {
            CostEvent::Linear { g } if matches!(domain.shape(), Shape::Vector(_)) => {
                sum.iter_mut().zip(g).for_each(|(s, x)| *s += x);
                let v = domain.lmo(&Gradient::Dense(sum.clone()), &LmoOptions::default())?.atom;
                out.push(v.dot(&sum));
            }
            CostEvent::Quadratic { target } if projectable => {
                sum.iter_mut().zip(target).for_each(|(s, x)| *s += x);
                sq += target.iter().map(|x| x * x).sum::<f64>();
                let mean: Vec<f64> = sum.iter().map(|s| s / t).collect();
                let x = domain.project(&mean)?;
                // Σ‖x - y‖² = t‖x‖² - 2 x·Σy + Σ‖y‖²
                let xx: f64 = x.iter().map(|v| v * v).sum();
                let xs: f64 = x.iter().zip(&sum).map(|(a, b)| a * b).sum();
                out.push(t * xx - 2.0 * xs + sq);
            }
            _ => {
                return Err(OfwError::UnsupportedDomain(format!(
                    "no closed-form prefix minimizer for {} costs on {}",
                    e.family().name(),
                    domain.name()
                )))
            }
        }
    }
    Ok(out)
}
