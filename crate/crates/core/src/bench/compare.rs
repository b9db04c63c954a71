//! Online matrix completion: OFW against OGD on a trace-norm ball.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ratings::RatingRecord;
use crate::baselines::{OgdConfig, OgdPlayer};
use crate::engine::{CostEvent, CostFamily, EngineOptions, OfwEngine};
use crate::error::{OfwError, Result};
use crate::oracles::{DomainSpec, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_TOL};
use crate::schedule::{CostMetadata, Setting};
use crate::trace::{RegretTrace, RoundRecord, TraceWriter};

/// Rounds between entry-cache spot checks.
pub const CACHE_CHECK_EVERY: usize = 500;
/// Entries compared per spot check.
pub const CACHE_CHECK_SAMPLES: usize = 20;
pub const CACHE_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithms {
    Ofw,
    Ogd,
    Both,
}

impl Algorithms {
    fn ofw(self) -> bool {
        self != Algorithms::Ogd
    }

    fn ogd(self) -> bool {
        self != Algorithms::Ofw
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub rows: usize,
    pub cols: usize,
    pub tau: f64,
    pub horizon: usize,
    pub seed: u64,
    pub algorithms: Algorithms,
    pub power_tol: f64,
    pub ofw_trace: Option<PathBuf>,
    pub ogd_trace: Option<PathBuf>,
    /// Run the two players on separate threads. Per-round timings are only
    /// comparable when two cores are free.
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(rows: usize, cols: usize, tau: f64, horizon: usize) -> Self {
        Self {
            rows,
            cols,
            tau,
            horizon,
            seed: 0,
            algorithms: Algorithms::Both,
            power_tol: DEFAULT_POWER_TOL,
            ofw_trace: None,
            ogd_trace: None,
            parallel: false,
        }
    }

    fn validate(&self, records: &[RatingRecord]) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(OfwError::Parameter(format!("tau = {} must be > 0", self.tau)));
        }
        if self.horizon == 0 {
            return Err(OfwError::Parameter("horizon must be >= 1".into()));
        }
        if self.horizon > records.len() {
            return Err(OfwError::Input(format!("horizon {} exceeds {} records", self.horizon, records.len())));
        }
        if let Some(r) = records[..self.horizon].iter().find(|r| r.user >= self.rows || r.item >= self.cols) {
            return Err(OfwError::Input(format!(
                "record ({}, {}) outside {}x{}",
                r.user + 1,
                r.item + 1,
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub window: usize,
    pub ofw_window_losses: Vec<f64>,
    pub ogd_window_losses: Vec<f64>,
    pub ofw_total: Duration,
    pub ogd_total: Duration,
    pub ofw_mean_round: Duration,
    pub ogd_mean_round: Duration,
    /// OGD time over OFW time in each window.
    pub time_ratios: Vec<f64>,
    pub cache_checks: usize,
    pub cache_max_error: f64,
    pub lmo_warnings: usize,
}

impl BenchSummary {
    /// `key=value` lines for the command line.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("window={}", self.window)];
        let mut push_alg = |name: &str, losses: &[f64], total: Duration, mean: Duration| {
            if let (Some(first), Some(last)) = (losses.first(), losses.last()) {
                out.push(format!("{name}_total_ns={}", total.as_nanos()));
                out.push(format!("{name}_mean_round_ns={}", mean.as_nanos()));
                out.push(format!("{name}_first_window_loss={first}"));
                out.push(format!("{name}_final_window_loss={last}"));
            }
        };
        push_alg("ofw", &self.ofw_window_losses, self.ofw_total, self.ofw_mean_round);
        push_alg("ogd", &self.ogd_window_losses, self.ogd_total, self.ogd_mean_round);
        if !self.time_ratios.is_empty() {
            let series: Vec<String> = self.time_ratios.iter().map(|r| format!("{r:.3}")).collect();
            out.push(format!("time_ratio_series={}", series.join(",")));
        }
        if !self.ofw_window_losses.is_empty() {
            out.push(format!("cache_checks={}", self.cache_checks));
            out.push(format!("cache_max_error={:e}", self.cache_max_error));
            out.push(format!("lmo_warnings={}", self.lmo_warnings));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub ofw: Option<RegretTrace>,
    pub ogd: Option<RegretTrace>,
    pub summary: BenchSummary,
}

fn window_means(values: &[f64], window: usize) -> Vec<f64> {
    values.chunks(window).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect()
}

fn window_times(trace: &RegretTrace, window: usize) -> Vec<Duration> {
    trace.records.chunks(window).map(|c| c.iter().map(|r| r.elapsed).sum()).collect()
}

fn open_writer(path: &Option<PathBuf>) -> Result<Option<TraceWriter<BufWriter<File>>>> {
    path.as_ref().map(|p| TraceWriter::new(BufWriter::new(File::create(p)?))).transpose()
}

struct OfwBench {
    trace: RegretTrace,
    checks: usize,
    max_error: f64,
}

fn bench_ofw(config: &BenchConfig, domain: &DomainSpec, meta: &CostMetadata, events: &[CostEvent]) -> Result<OfwBench> {
    let opts = EngineOptions {
        seed: config.seed,
        power_tol: config.power_tol,
        power_max_iters: DEFAULT_POWER_MAX_ITERS,
        mc_samples: 1,
        track_gap: false,
        diameter: None,
    };
    let mut engine = OfwEngine::new(domain.clone(), CostFamily::MatrixEntry, meta, Setting::StochSmooth, opts)?;
    let mut writer = open_writer(&config.ofw_trace)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x5eed));
    let mut out = OfwBench { trace: RegretTrace::default(), checks: 0, max_error: 0.0 };
    for event in events {
        let r = engine.step(event)?;
        if !r.converged {
            out.trace.lmo_warnings += 1;
        }
        let rec = RoundRecord {
            t: r.t,
            loss: r.loss,
            cum_regret: None,
            delta_t: None,
            support_size: r.support_size,
            elapsed: r.elapsed,
        };
        if let Some(w) = writer.as_mut() {
            w.push(&rec)?;
        }
        out.trace.records.push(rec);
        if r.t % CACHE_CHECK_EVERY == 0 || r.t == events.len() {
            let err = engine.check_entry_cache(CACHE_CHECK_SAMPLES, &mut rng)?;
            out.checks += 1;
            out.max_error = out.max_error.max(err);
            if err > CACHE_CHECK_TOL {
                return Err(OfwError::ContractViolation(format!(
                    "entry cache drifted by {err:e} at round {}",
                    r.t
                )));
            }
        }
    }
    if let Some(w) = writer {
        w.finish()?;
    }
    Ok(out)
}

fn bench_ogd(config: &BenchConfig, domain: &DomainSpec, meta: &CostMetadata, events: &[CostEvent]) -> Result<RegretTrace> {
    let mut player = OgdPlayer::new(domain.clone(), OgdConfig::standard(domain, meta)?)?;
    let mut writer = open_writer(&config.ogd_trace)?;
    let mut trace = RegretTrace::default();
    for event in events {
        let rec = player.step(event)?;
        if let Some(w) = writer.as_mut() {
            w.push(&rec)?;
        }
        trace.records.push(rec);
    }
    if let Some(w) = writer {
        w.finish()?;
    }
    Ok(trace)
}

/// Plays the first `config.horizon` records in file order with the
/// smooth stochastic OFW schedule and, if requested, with OGD.
pub fn run_cf_compare(config: &BenchConfig, records: &[RatingRecord]) -> Result<CompareOutput> {
    config.validate(records)?;
    let domain = DomainSpec::trace_norm_ball(config.rows, config.cols, config.tau)?;
    let events: Vec<CostEvent> = records[..config.horizon].iter().map(|r| r.to_event()).collect();
    let max_rating = events
        .iter()
        .map(|e| match e {
            CostEvent::MatrixEntry { rating, .. } => rating.abs(),
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    let meta = CostFamily::MatrixEntry.metadata(&domain, max_rating)?;

    let run_ofw = || config.algorithms.ofw().then(|| bench_ofw(config, &domain, &meta, &events)).transpose();
    let run_ogd = || config.algorithms.ogd().then(|| bench_ogd(config, &domain, &meta, &events)).transpose();
    let (ofw, ogd) = if config.parallel && config.algorithms == Algorithms::Both {
        std::thread::scope(|s| {
            let h = s.spawn(run_ogd);
            let ofw = run_ofw();
            let ogd = h.join().map_err(|_| OfwError::Numeric("OGD thread panicked".into()))?;
            Ok::<_, OfwError>((ofw?, ogd?))
        })?
    } else {
        (run_ofw()?, run_ogd()?)
    };

    let window = (config.horizon / 20).max(1);
    let mut summary = BenchSummary {
        window,
        ofw_window_losses: Vec::new(),
        ogd_window_losses: Vec::new(),
        ofw_total: Duration::ZERO,
        ogd_total: Duration::ZERO,
        ofw_mean_round: Duration::ZERO,
        ogd_mean_round: Duration::ZERO,
        time_ratios: Vec::new(),
        cache_checks: 0,
        cache_max_error: 0.0,
        lmo_warnings: 0,
    };
    if let Some(o) = &ofw {
        summary.ofw_window_losses = window_means(&o.trace.losses(), window);
        summary.ofw_total = o.trace.total_elapsed();
        summary.ofw_mean_round = o.trace.mean_round_time();
        summary.cache_checks = o.checks;
        summary.cache_max_error = o.max_error;
        summary.lmo_warnings = o.trace.lmo_warnings;
    }
    if let Some(g) = &ogd {
        summary.ogd_window_losses = window_means(&g.losses(), window);
        summary.ogd_total = g.total_elapsed();
        summary.ogd_mean_round = g.mean_round_time();
    }
    if let (Some(o), Some(g)) = (&ofw, &ogd) {
        summary.time_ratios = window_times(g, window)
            .iter()
            .zip(window_times(&o.trace, window))
            .map(|(a, b)| a.as_secs_f64() / b.as_secs_f64().max(1e-12))
            .collect();
    }
    Ok(CompareOutput { ofw: ofw.map(|o| o.trace), ogd, summary })
}
