//! Online gradient descent with projections, the comparison algorithm for
//! the projection-free player.

use crate::clock::Instant;

use crate::engine::CostEvent;
use crate::error::{OfwError, Result};
use crate::iterate::Shape;
use crate::oracles::DomainSpec;
use crate::schedule::CostMetadata;
use crate::trace::{RegretTrace, RoundRecord};

/// Step sizes `η_t = eta_coef / √t` and the starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct OgdConfig {
    pub eta_coef: f64,
    pub x1: Vec<f64>,
}

impl OgdConfig {
    /// `η_t = D / (L √t)`, starting from the projection of the origin.
    pub fn standard(domain: &DomainSpec, meta: &CostMetadata) -> Result<Self> {
        let x1 = domain.project(&vec![0.0; domain.dim()])?;
        Self::new(domain.diameter() / meta.lipschitz, x1)
    }

    pub fn new(eta_coef: f64, x1: Vec<f64>) -> Result<Self> {
        if !(eta_coef > 0.0) || !eta_coef.is_finite() {
            return Err(OfwError::Parameter(format!("step coefficient {eta_coef} must be > 0")));
        }
        Ok(Self { eta_coef, x1 })
    }

    pub fn eta(&self, t: usize) -> f64 {
        self.eta_coef / (t as f64).sqrt()
    }
}

/// `project(x - η g)`
pub fn ogd_round(x: &[f64], g: &[f64], eta: f64, domain: &DomainSpec) -> Result<Vec<f64>> {
    if x.len() != g.len() {
        return Err(OfwError::Shape(format!("point has {} coordinates, gradient {}", x.len(), g.len())));
    }
    let y: Vec<f64> = x.iter().zip(g).map(|(a, b)| a - eta * b).collect();
    domain.project(&y)
}

#[derive(Debug, Clone)]
pub struct OgdRun {
    pub trace: RegretTrace,
    pub final_point: Vec<f64>,
}

/// Stateful OGD player; the iterate is stored densely.
#[derive(Debug, Clone)]
pub struct OgdPlayer {
    domain: DomainSpec,
    config: OgdConfig,
    cols: usize,
    x: Vec<f64>,
    t: usize,
}

impl OgdPlayer {
    pub fn new(domain: DomainSpec, config: OgdConfig) -> Result<Self> {
        if !domain.contains(&config.x1, 1e-8)? {
            return Err(OfwError::Parameter("starting point is not in the domain".into()));
        }
        let cols = match domain.shape() {
            Shape::Matrix(_, n) => n,
            Shape::Vector(_) => 0,
        };
        let x = config.x1.clone();
        Ok(Self { domain, config, cols, x, t: 1 })
    }

    /// The point to be played next.
    pub fn point(&self) -> &[f64] {
        &self.x
    }

    /// Plays `x_t`, observes `f_t` and projects the gradient step.
    pub fn step(&mut self, event: &CostEvent) -> Result<RoundRecord> {
        let t = self.t;
        let start = Instant::now();
        let loss = event.value(&self.x, self.cols)?;
        let g = event.subgradient(&self.x, self.cols)?;
        self.x = ogd_round(&self.x, &g, self.config.eta(t), &self.domain)?;
        let elapsed = start.elapsed();
        self.t += 1;
        Ok(RoundRecord { t, loss, cum_regret: None, delta_t: None, support_size: 0, elapsed })
    }
}

/// Runs OGD on the instantaneous subgradients of `events[..horizon]`.
pub fn ogd_run(domain: &DomainSpec, events: &[CostEvent], config: &OgdConfig, horizon: usize) -> Result<OgdRun> {
    if events.len() < horizon {
        return Err(OfwError::Input(format!("stream has {} events, horizon is {horizon}", events.len())));
    }
    let mut player = OgdPlayer::new(domain.clone(), config.clone())?;
    let mut trace = RegretTrace { records: Vec::with_capacity(horizon), lmo_warnings: 0 };
    for event in &events[..horizon] {
        trace.records.push(player.step(event)?);
    }
    Ok(OgdRun { trace, final_point: player.x })
}
