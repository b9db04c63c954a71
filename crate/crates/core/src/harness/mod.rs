//! Streams, comparators and regret accounting.

mod hindsight;
mod regret;
mod stream;

pub use hindsight::{average_value, best_in_hindsight, prefix_minima, Hindsight};
pub use regret::{regret_of, tail_slope, Comparator};
pub use stream::{
    gen_stream, AdversarialPattern, ExpectedCost, PlantedMatrix, Stream, StreamKind, StreamSpec, TargetLaw,
};

use crate::engine::{run_ofw, EngineOptions, RunConfig};
use crate::error::{OfwError, Result};
use crate::iterate::SparseIterate;
use crate::oracles::DomainSpec;
use crate::schedule::Setting;
use crate::trace::RegretTrace;

/// How regret is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegretMode {
    /// `Σ f*(x_t) - f*(x*)` with `f* = E f_t`; stochastic vector streams only.
    Expected,
    /// `Σ f_t(x_t) - min_K Σ f_t`, per prefix when a closed form exists.
    Empirical,
}

/// Default offline Frank-Wolfe budget for a horizon.
pub fn default_hindsight_iters(horizon: usize) -> usize {
    (10.0 * (horizon as f64).sqrt()).ceil() as usize
}

#[derive(Debug, Clone)]
pub struct ScoredRun {
    /// Trace with `cum_regret` filled in.
    pub trace: RegretTrace,
    pub regret: Vec<f64>,
    /// An upper bound on the final regret that stays valid when the
    /// comparator comes from an inexact offline solve.
    pub regret_upper: f64,
    pub final_iterate: SparseIterate,
}

/// Empirical regret series of a loss sequence and a conservative final
/// value.
pub fn empirical_regret(domain: &DomainSpec, stream: &Stream, losses: &[f64]) -> Result<(Vec<f64>, f64)> {
    let events = &stream.events[..losses.len()];
    if let Ok(minima) = prefix_minima(domain, events) {
        let r = regret_of(losses, Comparator::PerPrefix(&minima))?;
        let last = *r.last().unwrap_or(&0.0);
        return Ok((r, last));
    }
    let h = best_in_hindsight(domain, events, default_hindsight_iters(losses.len()))?;
    let cols = match domain.shape() {
        crate::iterate::Shape::Matrix(_, n) => n,
        crate::iterate::Shape::Vector(_) => 0,
    };
    let per_round = events.iter().map(|e| e.value(&h.point, cols)).collect::<Result<Vec<_>>>()?;
    let r = regret_of(losses, Comparator::PerRound(&per_round))?;
    let played: f64 = losses.iter().sum();
    Ok((r, played - losses.len() as f64 * h.lower_bound()))
}

/// Runs OFW on the first `horizon` events of `stream` and scores it.
pub fn score_ofw(
    domain: &DomainSpec,
    stream: &Stream,
    setting: Setting,
    horizon: usize,
    engine: EngineOptions,
    mode: RegretMode,
) -> Result<ScoredRun> {
    let config = RunConfig { horizon, engine };
    match mode {
        RegretMode::Expected => {
            let expected = stream
                .expected
                .as_ref()
                .ok_or_else(|| OfwError::Configuration("expected regret needs a stochastic stream".into()))?;
            let (_, star) = expected.minimizer(domain)?;
            let mut probe = |x: &SparseIterate| expected.value(&x.densify());
            let mut run = run_ofw(domain, &stream.events, &stream.meta, setting, &config, Some(&mut probe))?;
            let regret = regret_of(&run.probes, Comparator::PerRound(&vec![star; horizon]))?;
            run.trace.set_regret(&regret)?;
            let regret_upper = *regret.last().unwrap_or(&0.0);
            Ok(ScoredRun { trace: run.trace, regret, regret_upper, final_iterate: run.final_iterate })
        }
        RegretMode::Empirical => {
            let mut run = run_ofw(domain, &stream.events, &stream.meta, setting, &config, None)?;
            let (regret, regret_upper) = empirical_regret(domain, stream, &run.trace.losses())?;
            run.trace.set_regret(&regret)?;
            Ok(ScoredRun { trace: run.trace, regret, regret_upper, final_iterate: run.final_iterate })
        }
    }
}
