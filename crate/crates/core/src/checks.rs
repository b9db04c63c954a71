//! Self-checks behind the `lmo-check` and `bounds-check` commands.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::{run_ofw, EngineOptions, RunConfig};
use crate::error::Result;
use crate::harness::{gen_stream, score_ofw, AdversarialPattern, RegretMode, StreamKind, StreamSpec, TargetLaw};
use crate::oracles::{singular_values, DomainSpec, FlowGraph, Gradient, LmoOptions};
use crate::schedule::{Schedule, Setting};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn gaussian<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A random DAG on `nodes` nodes (edges only go forward) with an `s-t`
/// path guaranteed by a random chain.
pub fn random_dag<R: Rng>(rng: &mut R, nodes: usize, density: f64) -> Result<FlowGraph> {
    let mut edges = Vec::new();
    for u in 0..nodes {
        for v in u + 1..nodes {
            if rng.gen::<f64>() < density {
                edges.push((u, v));
            }
        }
    }
    let mut u = 0;
    while u + 1 < nodes {
        let v = rng.gen_range(u + 1..nodes);
        if !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
        u = v;
    }
    FlowGraph::new(nodes, edges, 0, nodes - 1)
}

fn all_paths(g: &FlowGraph, u: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if u == g.sink() {
        out.push(path.clone());
        return;
    }
    for &e in g.out_edges(u) {
        path.push(e);
        all_paths(g, g.edges()[e].1, path, out);
        path.pop();
    }
}

fn worst_error(name: &str, trials: usize, errors: impl Iterator<Item = Result<f64>>, tol: f64) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    for e in errors {
        worst = worst.max(e?);
    }
    Ok(CheckOutcome {
        name: name.into(),
        passed: worst <= tol,
        detail: format!("{trials} random costs, worst objective error {worst:e} (tol {tol:e})"),
    })
}

/// Compares every linear oracle against enumeration (or a dense SVD for
/// the trace-norm ball) on random costs.
pub fn lmo_checks(seed: u64, trials: usize, power_tol: f64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = LmoOptions { power_tol, ..LmoOptions::default() };
    let mut out = Vec::new();

    let mut errs = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(1..=10);
        let c = gaussian(&mut rng, n);
        let atom = DomainSpec::simplex(n)?.lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        let brute = c.iter().cloned().fold(f64::INFINITY, f64::min);
        errs.push(Ok((atom.dot(&c) - brute).abs()));
    }
    out.push(worst_error("simplex", trials, errs.into_iter(), 1e-12)?);

    let mut errs = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(1..=10);
        let r = rng.gen_range(0.1..3.0);
        let c = gaussian(&mut rng, n);
        let atom = DomainSpec::ball(n, r)?.lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        errs.push(Ok((atom.dot(&c) + r * dot(&c, &c).sqrt()).abs()));
    }
    out.push(worst_error("ball", trials, errs.into_iter(), 1e-12)?);

    let mut errs = Vec::new();
    for _ in 0..trials {
        let nodes = rng.gen_range(2..=8);
        let g = random_dag(&mut rng, nodes, 0.5)?;
        let c = gaussian(&mut rng, g.edge_count());
        let atom = DomainSpec::FlowPolytope(g.clone()).lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        let mut paths = Vec::new();
        all_paths(&g, g.source(), &mut Vec::new(), &mut paths);
        let brute = paths.iter().map(|p| p.iter().map(|&e| c[e]).sum::<f64>()).fold(f64::INFINITY, f64::min);
        errs.push(Ok((atom.dot(&c) - brute).abs()));
    }
    out.push(worst_error("flow", trials, errs.into_iter(), 1e-12)?);

    let mut errs = Vec::new();
    for _ in 0..trials {
        let n = rng.gen_range(1..=12);
        let k = rng.gen_range(1..=4.min(n));
        let c = gaussian(&mut rng, n);
        let atom = DomainSpec::uniform_matroid(n, k)?.lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        let brute = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize <= k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| c[i]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        errs.push(Ok((atom.dot(&c) - brute).abs()));
    }
    out.push(worst_error("uniform_matroid", trials, errs.into_iter(), 1e-12)?);

    let mut errs = Vec::new();
    let trace_trials = trials.min(50);
    for k in 0..trace_trials {
        let (m, n, tau) = (20, 30, 1.0 + k as f64 % 3.0);
        let c = gaussian(&mut rng, m * n);
        let lmo = LmoOptions { seed: seed.wrapping_add(k as u64), ..opts };
        let atom = DomainSpec::trace_norm_ball(m, n, tau)?.lmo(&Gradient::Dense(c.clone()), &lmo)?.atom;
        let best = -tau * singular_values(&c, m, n)?[0];
        errs.push(Ok(((atom.dot(&c) - best) / best).abs()));
    }
    out.push(worst_error("trace_norm_ball (relative)", trace_trials, errs.into_iter(), 1e-4)?);
    Ok(out)
}

/// `Δ_t <= max{9D²β, 3LD} t^{-1/2}` at every round of a quadratic stream on
/// a ball.
pub fn gap_bound_check(n: usize, horizon: usize, seed: u64) -> Result<CheckOutcome> {
    let domain = DomainSpec::ball(n, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let spec = StreamSpec { kind: StreamKind::Quadratic(TargetLaw::UniformBall { center, radius: 0.5 }), horizon, seed };
    let stream = gen_stream(&spec, &domain)?;
    let config = RunConfig { horizon, engine: EngineOptions { seed, ..EngineOptions::default() } };
    let run = run_ofw(&domain, &stream.events, &stream.meta, Setting::StochSmooth, &config, None)?;
    let schedule = Schedule::from_setting(&stream.meta, domain.diameter(), Setting::StochSmooth)?;
    let mut worst = 0.0_f64;
    let mut violations = 0;
    for r in &run.trace.records {
        let gap = r.delta_t.unwrap_or(f64::INFINITY);
        let bound = schedule.gap_bound(r.t);
        worst = worst.max(gap / bound);
        if gap > bound + 1e-9 {
            violations += 1;
        }
    }
    Ok(CheckOutcome {
        name: format!("gap bound, quadratic on Ball(n={n})"),
        passed: violations == 0,
        detail: format!("T={horizon}, {violations} violations, max gap/bound {worst:.4}"),
    })
}

/// Final regret `<= 57 L D T^{3/4}` on adversarial linear streams.
pub fn adversarial_bound_checks(horizon: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for domain in [DomainSpec::simplex(10)?, DomainSpec::ball(20, 1.0)?] {
        for pattern in AdversarialPattern::ALL {
            let spec = StreamSpec { kind: StreamKind::LinearAdversarial { pattern, scale: 1.0 }, horizon, seed };
            let stream = gen_stream(&spec, &domain)?;
            let engine = EngineOptions { seed, ..EngineOptions::default() };
            let scored = score_ofw(&domain, &stream, Setting::Adversarial, horizon, engine, RegretMode::Empirical)?;
            let bound = 57.0 * stream.meta.lipschitz * domain.diameter() * (horizon as f64).powf(0.75);
            out.push(CheckOutcome {
                name: format!("adversarial regret, {pattern} on {domain}"),
                passed: scored.regret_upper <= bound,
                detail: format!("T={horizon}, regret {:.3} <= bound {bound:.1}", scored.regret_upper),
            });
        }
    }
    Ok(out)
}

pub fn bounds_checks(horizon: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = vec![gap_bound_check(5, horizon, seed)?];
    out.extend(adversarial_bound_checks(horizon, seed)?);
    Ok(out)
}
