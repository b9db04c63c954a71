//! The online Frank-Wolfe player.
//!
//! Each round plays `x_t`, folds `f_t` into the running average `F_t`, asks
//! the domain oracle for `v_t = argmin_{x ∈ K} ∇F_t(x_t)·x` and moves to
//! `x_{t+1} = (1 - t^{-a}) x_t + t^{-a} v_t`. The stochastic non-smooth
//! setting averages ball-smoothed costs with radius `δ_t = √n D t^{-1/3}`;
//! the adversarial setting averages the surrogates
//! `∇f_t(x_t)·x + σ_t ‖x - x_1‖²`.

mod aggregate;
mod cost;
mod sampler;
mod smoothing;

pub use aggregate::{make_adversarial_surrogate, surrogate_sigma, AggregateState, SurrogateTerm};
pub use cost::{CostEvent, CostFamily};
pub use sampler::{sample_play, LazySampler};
pub use smoothing::{
    sample_ball, sample_sphere, smoothed_abs_gradient, smoothed_value, BallMarginal, SmoothingConfig,
};

use std::sync::Arc;
use std::time::Duration;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::Instant;
use crate::error::{OfwError, Result};
use crate::iterate::{BoundaryAtom, SparseIterate};
use crate::oracles::{DomainSpec, Gradient, LmoOptions, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL};
use crate::schedule::{CostMetadata, Schedule, Setting};
use crate::trace::{RegretTrace, RoundRecord};

/// Output of one Frank-Wolfe step.
#[derive(Debug, Clone)]
pub struct RoundOutput {
    pub x_next: SparseIterate,
    pub v: BoundaryAtom,
    pub alpha: f64,
    pub converged: bool,
}

/// One step `x_{t+1} = (1 - t^{-a}) x_t + t^{-a} lmo(∇F_t(x_t))`.
pub fn ofw_round(
    x: &SparseIterate,
    grad: &Gradient,
    schedule: &Schedule,
    domain: &DomainSpec,
    lmo: &LmoOptions,
) -> Result<RoundOutput> {
    let out = domain.lmo(grad, lmo)?;
    let alpha = schedule.step(x.round());
    let x_next = x.mix(out.atom.clone(), alpha)?;
    Ok(RoundOutput { x_next, v: out.atom, alpha, converged: out.converged })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    pub seed: u64,
    pub power_tol: f64,
    pub power_max_iters: usize,
    pub mc_samples: usize,
    /// Record `Δ_t` when the averaged objective has a closed-form minimizer.
    pub track_gap: bool,
    /// Diameter bound used by the schedules in place of the domain's own;
    /// must not be smaller.
    pub diameter: Option<f64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            power_tol: DEFAULT_POWER_TOL,
            power_max_iters: DEFAULT_POWER_MAX_ITERS,
            mc_samples: 1,
            track_gap: true,
            diameter: None,
        }
    }
}

/// What happened in one round.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub t: usize,
    /// `f_t(x_t)`
    pub loss: f64,
    pub delta_t: Option<f64>,
    pub alpha: f64,
    pub v: Arc<BoundaryAtom>,
    /// Support of the played point `x_t`.
    pub support_size: usize,
    pub converged: bool,
    /// Algorithm time only; gap diagnostics are excluded.
    pub elapsed: Duration,
}

/// Stateful OFW player for one cost family on one domain.
#[derive(Debug, Clone)]
pub struct OfwEngine {
    domain: DomainSpec,
    schedule: Schedule,
    setting: Setting,
    state: AggregateState,
    x: SparseIterate,
    lmo: LmoOptions,
    rng: ChaCha8Rng,
    track_gap: bool,
}

impl OfwEngine {
    pub fn new(
        domain: DomainSpec,
        family: CostFamily,
        meta: &CostMetadata,
        setting: Setting,
        opts: EngineOptions,
    ) -> Result<Self> {
        let diameter = match opts.diameter {
            Some(d) if !(d >= domain.diameter() * (1.0 - 1e-12)) => {
                return Err(OfwError::Parameter(format!(
                    "diameter bound {d} is below the diameter {} of {domain}",
                    domain.diameter()
                )))
            }
            Some(d) => d,
            None => domain.diameter(),
        };
        let schedule = Schedule::from_setting(meta, diameter, setting)?;
        let lmo = LmoOptions { power_tol: opts.power_tol, power_max_iters: opts.power_max_iters, seed: opts.seed };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let x1 = domain.initial_atom(&LmoOptions { seed: rng.next_u64(), ..lmo })?;
        let smoothing = match setting {
            Setting::StochNonsmooth => {
                Some(SmoothingConfig::for_domain(domain.dim(), diameter, opts.mc_samples, opts.seed)?)
            }
            _ => None,
        };
        let anchor = match setting {
            Setting::Adversarial => x1.to_dense(),
            _ => Vec::new(),
        };
        let state = AggregateState::new(&domain, family, setting, &anchor, meta.lipschitz, diameter, smoothing)?;
        Ok(Self {
            domain,
            schedule,
            setting,
            state,
            x: SparseIterate::single(x1),
            lmo,
            rng,
            track_gap: opts.track_gap,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    /// The point to be played next.
    pub fn iterate(&self) -> &SparseIterate {
        &self.x
    }

    pub fn aggregate(&self) -> &AggregateState {
        &self.state
    }

    /// Plays `x_t`, observes `f_t` and moves to `x_{t+1}`.
    pub fn step(&mut self, event: &CostEvent) -> Result<StepReport> {
        let start = Instant::now();
        let t = self.x.round();
        let support_size = self.x.support_size();
        let loss = event.value_at(&self.x)?;
        self.state.absorb(event, &self.x)?;
        let grad = self.state.gradient(&self.x)?;
        let lmo = LmoOptions { seed: self.rng.next_u64(), ..self.lmo };
        let out = self.domain.lmo(&grad, &lmo)?;
        let mut elapsed = start.elapsed();

        let delta_t = if self.track_gap { self.state.closed_form_gap(&self.domain, &self.x)? } else { None };

        let start = Instant::now();
        let alpha = self.schedule.step(t);
        let v = Arc::new(out.atom);
        self.state.on_mix(&v, alpha);
        self.x.mix_shared(Arc::clone(&v), alpha)?;
        elapsed += start.elapsed();
        Ok(StepReport { t, loss, delta_t, alpha, v, support_size, converged: out.converged, elapsed })
    }

    /// Largest deviation between `samples` random cached entries and their
    /// recomputation from the iterate. Zero for non-matrix families.
    pub fn check_entry_cache<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<f64> {
        let cached = self.state.cached_entries();
        if cached.is_empty() {
            return Ok(0.0);
        }
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let ((i, j), c) = cached[rng.gen_range(0..cached.len())];
            worst = worst.max((self.x.entry(i, j)? - c).abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub horizon: usize,
    pub engine: EngineOptions,
}

/// Result of a full run.
#[derive(Debug, Clone)]
pub struct OfwRun {
    /// `cum_regret` is left at zero; see `harness::regret_of`.
    pub trace: RegretTrace,
    /// Per-round values of the optional probe, evaluated at `x_t`.
    pub probes: Vec<f64>,
    pub final_iterate: SparseIterate,
}

/// Per-round observer evaluated at the played point (outside the timer).
pub type Probe<'a> = &'a mut dyn FnMut(&SparseIterate) -> Result<f64>;

/// Runs OFW for `config.horizon` rounds over `events`.
pub fn run_ofw(
    domain: &DomainSpec,
    events: &[CostEvent],
    meta: &CostMetadata,
    setting: Setting,
    config: &RunConfig,
    mut probe: Option<Probe<'_>>,
) -> Result<OfwRun> {
    let horizon = config.horizon;
    if events.len() < horizon {
        return Err(OfwError::Input(format!("stream has {} events, horizon is {horizon}", events.len())));
    }
    let family = events
        .first()
        .map(CostEvent::family)
        .ok_or_else(|| OfwError::Input("empty stream".into()))?;
    let mut engine = OfwEngine::new(domain.clone(), family, meta, setting, config.engine)?;
    let mut trace = RegretTrace { records: Vec::with_capacity(horizon), lmo_warnings: 0 };
    let mut probes = Vec::new();
    for event in &events[..horizon] {
        if let Some(p) = probe.as_mut() {
            probes.push(p(engine.iterate())?);
        }
        let r = engine.step(event)?;
        if !r.converged {
            trace.lmo_warnings += 1;
        }
        trace.records.push(RoundRecord {
            t: r.t,
            loss: r.loss,
            cum_regret: None,
            delta_t: r.delta_t,
            support_size: r.support_size,
            elapsed: r.elapsed,
        });
    }
    Ok(OfwRun { trace, probes, final_iterate: engine.x })
}
