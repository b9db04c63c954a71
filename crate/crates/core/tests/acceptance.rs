//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does.
//!
//! Lines are written straight to stdout so they show up without
//! `--nocapture`.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ofw::bench::{planted_ratings, run_cf_compare, BenchConfig, CACHE_CHECK_EVERY, CACHE_CHECK_TOL};
use ofw::engine::{
    make_adversarial_surrogate, run_ofw, sample_play, smoothed_abs_gradient, smoothed_value, surrogate_sigma,
    AggregateState, BallMarginal, CostEvent, CostFamily, EngineOptions, OfwEngine, RunConfig,
};
use ofw::error::Result;
use ofw::harness::{gen_stream, AdversarialPattern, Stream, StreamKind, StreamSpec, TargetLaw};
use ofw::iterate::{BoundaryAtom, SparseIterate};
use ofw::oracles::{DomainSpec, FlowGraph, Gradient, LmoOptions};
use ofw::schedule::Setting;

use common::*;

struct Verdict {
    passed: bool,
    detail: String,
}

type Criterion = fn() -> Result<Verdict>;

fn verdict(passed: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { passed, detail })
}

fn report(id: usize, name: &str, f: Criterion) -> bool {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => (v.passed, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = if passed { "PASS" } else { "FAIL" };
    let line = format!("{tag} criterion {id:>2} {name}: {detail} [{:.1} s]", start.elapsed().as_secs_f64());
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    passed
}

fn within(limit: Duration, start: Instant) -> bool {
    start.elapsed() < limit
}

fn engine_for(domain: &DomainSpec, stream: &Stream, setting: Setting, seed: u64) -> Result<OfwEngine> {
    OfwEngine::new(domain.clone(), stream.family, &stream.meta, setting, EngineOptions { seed, ..EngineOptions::default() })
}

fn linear_g(e: &CostEvent) -> &[f64] {
    match e {
        CostEvent::Linear { g } => g,
        _ => panic!("linear stream expected"),
    }
}

/// `min_K Σ_{τ≤t} g_τ·x` for every prefix, from the closed forms on the
/// simplex and the ball.
fn linear_prefix_minima(domain: &DomainSpec, events: &[CostEvent]) -> Vec<f64> {
    let mut sum = vec![0.0; domain.dim()];
    events
        .iter()
        .map(|e| {
            sum.iter_mut().zip(linear_g(e)).for_each(|(s, g)| *s += g);
            match domain {
                DomainSpec::Simplex { .. } => sum.iter().cloned().fold(f64::INFINITY, f64::min),
                DomainSpec::Ball { radius, .. } => -radius * norm(&sum),
                _ => unreachable!(),
            }
        })
        .collect()
}

/// Cumulative regret of OFW on a linear stream with losses recomputed from
/// the played points.
fn adversarial_regret(domain: &DomainSpec, stream: &Stream, horizon: usize, seed: u64) -> Result<Vec<f64>> {
    let mut engine = engine_for(domain, stream, Setting::Adversarial, seed)?;
    let minima = linear_prefix_minima(domain, &stream.events[..horizon]);
    let mut played = 0.0;
    let mut regret = Vec::with_capacity(horizon);
    for (e, m) in stream.events[..horizon].iter().zip(&minima) {
        played += dot(&engine.iterate().densify(), linear_g(e));
        engine.step(e)?;
        regret.push(played - m);
    }
    Ok(regret)
}

fn adversarial_streams(horizon: usize, seed: u64) -> Result<Vec<(DomainSpec, AdversarialPattern, Stream)>> {
    let mut out = Vec::new();
    for domain in [DomainSpec::simplex(10)?, DomainSpec::ball(20, 1.0)?] {
        for pattern in AdversarialPattern::ALL {
            let spec = StreamSpec { kind: StreamKind::LinearAdversarial { pattern, scale: 1.0 }, horizon, seed };
            let stream = gen_stream(&spec, &domain)?;
            out.push((domain.clone(), pattern, stream));
        }
    }
    Ok(out)
}

fn gap_bound_smooth() -> Result<Verdict> {
    let start = Instant::now();
    let (n, r, horizon) = (5, 1.0, 10_000);
    let domain = DomainSpec::ball(n, r)?;
    let law = TargetLaw::UniformBall { center: vec![0.0; n], radius: r };
    let stream = gen_stream(&StreamSpec { kind: StreamKind::Quadratic(law), horizon, seed: 1 }, &domain)?;
    // ‖x - y‖² with x, y in the unit ball: gradient norm ≤ 2(r + r), β = 1
    let (d, l, beta) = (2.0 * r, 4.0 * r, 1.0);
    let c = f64::max(9.0 * d * d * beta, 3.0 * l * d);
    let mut engine = engine_for(&domain, &stream, Setting::StochSmooth, 1)?;
    let mut mean = vec![0.0; n];
    let (mut violations, mut worst_ratio, mut worst_mismatch) = (0, 0.0_f64, 0.0_f64);
    for (k, e) in stream.events.iter().enumerate() {
        let t = k + 1;
        let CostEvent::Quadratic { target } = e else { unreachable!() };
        mean.iter_mut().zip(target).for_each(|(m, y)| *m += (y - *m) / t as f64);
        let x = engine.iterate().densify();
        let star = project_ball(&mean, r);
        let gap = sq_dist(&x, &mean) - sq_dist(&star, &mean);
        let bound = c / (t as f64).sqrt();
        if gap > bound + 1e-9 {
            violations += 1;
        }
        worst_ratio = worst_ratio.max(gap / bound);
        let report = engine.step(e)?;
        if let Some(lib_gap) = report.delta_t {
            worst_mismatch = worst_mismatch.max((lib_gap - gap).abs());
        }
    }
    let fast = within(Duration::from_secs(10), start);
    verdict(
        violations == 0 && fast && worst_mismatch < 1e-9,
        format!(
            "Ball(5,1) T={horizon}, C={c}: {violations} violations, max Δ_t/bound {worst_ratio:.4}, \
             reported Δ_t within {worst_mismatch:.1e} of recomputed"
        ),
    )
}

fn regret_bound_adversarial() -> Result<Verdict> {
    let start = Instant::now();
    let horizon = 4096;
    let mut worst = 0.0_f64;
    let mut all_ok = true;
    for (domain, pattern, stream) in adversarial_streams(horizon, 0)? {
        let l = stream.events.iter().map(|e| norm(linear_g(e))).fold(0.0, f64::max);
        assert!(l <= 1.0 + 1e-12, "{pattern}: gradient norm {l}");
        let d = match domain {
            DomainSpec::Simplex { .. } => 2f64.sqrt(),
            DomainSpec::Ball { radius, .. } => 2.0 * radius,
            _ => unreachable!(),
        };
        let bound = 57.0 * 1.0 * d * (horizon as f64).powf(0.75);
        let regret = *adversarial_regret(&domain, &stream, horizon, 0)?.last().unwrap();
        all_ok &= regret <= bound;
        worst = worst.max(regret / bound);
    }
    let fast = within(Duration::from_secs(10), start);
    verdict(all_ok && fast, format!("6 streams, T={horizon}: max final regret / (57 L D T^(3/4)) = {worst:.4}"))
}

/// Expected regret `Σ f*(x_t) - f*(x*)` of a stochastic run, with `f*`
/// evaluated by `expected`.
fn expected_regret(
    domain: &DomainSpec,
    stream: &Stream,
    setting: Setting,
    seed: u64,
    expected: &dyn Fn(&[f64]) -> f64,
    best: f64,
) -> Result<Vec<f64>> {
    let mut engine = engine_for(domain, stream, setting, seed)?;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(stream.events.len());
    for e in &stream.events {
        acc += expected(&engine.iterate().densify()) - best;
        engine.step(e)?;
        out.push(acc);
    }
    Ok(out)
}

fn regret_slopes() -> Result<Verdict> {
    let horizon = 10_000;
    let n = 5;
    let domain = DomainSpec::ball(n, 1.0)?;
    let mut smooth = Vec::new();
    let mut nonsmooth = Vec::new();
    let mut adversarial = Vec::new();
    for seed in 0..3u64 {
        let center: Vec<f64> = (0..n).map(|i| if i == 0 { 0.6 } else { 0.0 }).collect();
        let law = TargetLaw::UniformBall { center: center.clone(), radius: 0.8 };
        let stream = gen_stream(&StreamSpec { kind: StreamKind::Quadratic(law), horizon, seed }, &domain)?;
        // f*(x) = ‖x - c‖² + const with c inside the ball
        let f = |x: &[f64]| sq_dist(x, &center);
        let r = expected_regret(&domain, &stream, Setting::StochSmooth, seed, &f, 0.0)?;
        smooth.push(loglog_slope(&r, 0.1));

        let center = vec![0.2, -0.1, 0.3, 0.0, -0.2];
        let width = 0.5;
        let kind = StreamKind::Absolute { center: center.clone(), width };
        let stream = gen_stream(&StreamSpec { kind, horizon, seed }, &domain)?;
        let f = |x: &[f64]| x.iter().zip(&center).map(|(a, c)| uniform_abs_mean(a - c, width)).sum::<f64>();
        let best = f(&center);
        let r = expected_regret(&domain, &stream, Setting::StochNonsmooth, seed, &f, best)?;
        nonsmooth.push(loglog_slope(&r, 0.1));

        for (d, _, stream) in adversarial_streams(horizon, seed)? {
            adversarial.push(loglog_slope(&adversarial_regret(&d, &stream, horizon, seed)?, 0.1));
        }
    }
    let check = |slopes: &[Option<f64>], limit: f64| -> (bool, f64) {
        let ok = slopes.iter().all(|s| s.is_some_and(|s| s <= limit));
        let worst = slopes.iter().map(|s| s.unwrap_or(f64::INFINITY)).fold(f64::NEG_INFINITY, f64::max);
        (ok, worst)
    };
    let (a, wa) = check(&smooth, 0.65);
    let (b, wb) = check(&nonsmooth, 0.80);
    let (c, wc) = check(&adversarial, 0.85);
    verdict(
        a && b && c,
        format!(
            "T={horizon}, 3 seeds: max slope smooth {wa:.3} (<= 0.65), non-smooth {wb:.3} (<= 0.80), \
             adversarial {wc:.3} over 18 runs (<= 0.85)"
        ),
    )
}

fn lmo_equivalence() -> Result<Verdict> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = LmoOptions::default();
    let trials = 200;
    let mut worst = [0.0_f64; 4];

    for _ in 0..trials {
        let n = rng.gen_range(1..=10);
        let c = gaussian(&mut rng, n);
        let atom = DomainSpec::simplex(n)?.lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        let brute = (0..n).map(|i| c[i]).fold(f64::INFINITY, f64::min);
        worst[0] = worst[0].max((atom.dot(&c) - brute).abs());
    }
    for _ in 0..trials {
        let nodes = rng.gen_range(2..=8);
        let edges = random_dag_edges(&mut rng, nodes, 0.5);
        let c = gaussian(&mut rng, edges.len());
        let graph = FlowGraph::new(nodes, edges.clone(), 0, nodes - 1)?;
        let atom = DomainSpec::FlowPolytope(graph).lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        let brute = dag_paths(&edges, 0, nodes - 1)
            .iter()
            .map(|p| p.iter().map(|&e| c[e]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        worst[1] = worst[1].max((atom.dot(&c) - brute).abs());
    }
    for _ in 0..trials {
        let n = rng.gen_range(1..=12);
        let k = rng.gen_range(1..=n.min(4));
        let c = gaussian(&mut rng, n);
        let atom = DomainSpec::uniform_matroid(n, k)?.lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        worst[2] = worst[2].max((atom.dot(&c) - matroid_brute_force(&c, k)).abs());
    }
    for _ in 0..trials {
        let n = rng.gen_range(1..=10);
        let r = rng.gen_range(0.1..3.0);
        let c = gaussian(&mut rng, n);
        let atom = DomainSpec::ball(n, r)?.lmo(&Gradient::Dense(c.clone()), &opts)?.atom;
        worst[3] = worst[3].max((atom.dot(&c) + r * norm(&c)).abs());
    }
    let fast = within(Duration::from_secs(5), start);
    verdict(
        worst.iter().all(|&w| w <= 1e-12) && fast,
        format!(
            "{trials} costs each, worst |error|: simplex {:.1e}, flow {:.1e}, matroid {:.1e}, ball {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn trace_lmo() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (m, n) = (20, 30);
    let mut worst = 0.0_f64;
    let mut unconverged = 0;
    for k in 0..50u64 {
        let tau = rng.gen_range(0.5..5.0);
        let c = gaussian(&mut rng, m * n);
        let opts = LmoOptions { power_tol: 1e-5, seed: k, ..LmoOptions::default() };
        let out = DomainSpec::trace_norm_ball(m, n, tau)?.lmo(&Gradient::Dense(c.clone()), &opts)?;
        if !out.converged {
            unconverged += 1;
        }
        let best = -tau * jacobi_singular_values(&c, m, n)[0];
        worst = worst.max(((out.atom.dot(&c) - best) / best).abs());
    }
    verdict(
        worst <= 1e-4 && unconverged == 0,
        format!("50 matrices 20x30: worst relative objective error {worst:.2e}, {unconverged} unconverged at tol 1e-5"),
    )
}

fn smoothing_suite() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 5;
    let lipschitz = (n as f64).sqrt();
    let marginal = BallMarginal::new(n)?;
    let mut bound_violations = 0;
    let mut worst_fd = 0.0_f64;
    for _ in 0..100 {
        let target = gaussian(&mut rng, n);
        let delta = rng.gen_range(0.05..1.0);
        // half the points sit within δ of the target, where smoothing bites
        let x: Vec<f64> = if rng.gen::<bool>() {
            target.iter().zip(ball_point(&mut rng, n)).map(|(t, u)| t + delta * u).collect()
        } else {
            gaussian(&mut rng, n)
        };
        let f = CostEvent::Absolute { target: target.clone() };
        let exact = f.value(&x, 0)?;
        let smooth = smoothed_value(&f, &x, delta, 1, 0)?;
        if (exact - smooth).abs() > delta * lipschitz || smooth < exact - 1e-12 {
            bound_violations += 1;
        }
        let grad = smoothed_abs_gradient(&target, &x, delta, &marginal);
        let h = 1e-5;
        for i in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (smoothed_value(&f, &xp, delta, 1, 0)? - smoothed_value(&f, &xm, delta, 1, 0)?) / (2.0 * h);
            worst_fd = worst_fd.max((fd - grad[i]).abs());
        }
    }

    let samples = 100_000;
    let mut worst_se = 0.0_f64;
    for _ in 0..20 {
        let target = gaussian(&mut rng, n);
        let delta = rng.gen_range(0.2..1.0);
        let x: Vec<f64> = target.iter().zip(ball_point(&mut rng, n)).map(|(t, u)| t + delta * u).collect();
        let f = CostEvent::Absolute { target: target.clone() };
        let closed = smoothed_value(&f, &x, delta, 1, 0)?;
        let draws: Vec<f64> = (0..samples)
            .map(|_| {
                let u = ball_point(&mut rng, n);
                let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + delta * b).collect();
                f.value(&y, 0)
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_and_stderr(&draws);
        worst_se = worst_se.max((mean - closed).abs() / se);
    }
    verdict(
        bound_violations == 0 && worst_fd <= 1e-6 && worst_se <= 3.0,
        format!(
            "n={n}: {bound_violations}/100 points outside |f - f̂| <= δL, worst finite-difference error {worst_fd:.1e}, \
             Monte Carlo ({samples} sphere-radius draws) worst deviation {worst_se:.2} SE over 20 points"
        ),
    )
}

fn vertex_index(atom: &BoundaryAtom) -> usize {
    let v = atom.to_dense();
    (0..v.len()).find(|&i| v[i] == 1.0).expect("simplex vertex")
}

fn sparsity_and_sampler() -> Result<Verdict> {
    // support never exceeds t, across settings and domains
    let mut worst_support_excess: i64 = i64::MIN;
    let runs: Vec<(DomainSpec, StreamKind, Setting)> = vec![
        (
            DomainSpec::simplex(6)?,
            StreamKind::Quadratic(TargetLaw::UniformBall { center: vec![1.0 / 6.0; 6], radius: 0.5 }),
            Setting::StochSmooth,
        ),
        (DomainSpec::ball(4, 1.0)?, StreamKind::Absolute { center: vec![0.1; 4], width: 0.4 }, Setting::StochNonsmooth),
        (
            DomainSpec::ball(8, 1.0)?,
            StreamKind::LinearAdversarial { pattern: AdversarialPattern::Drifting, scale: 1.0 },
            Setting::Adversarial,
        ),
        (
            DomainSpec::uniform_matroid(9, 3)?,
            StreamKind::LinearAdversarial { pattern: AdversarialPattern::RandomSign, scale: 1.0 },
            Setting::Adversarial,
        ),
        (DomainSpec::trace_norm_ball(8, 10, 20.0)?, StreamKind::MatrixEntry { rank: 2, noise: 0.1 }, Setting::StochSmooth),
    ];
    for (domain, kind, setting) in runs {
        let horizon = 300;
        let stream = gen_stream(&StreamSpec { kind, horizon, seed: 7 }, &domain)?;
        let config = RunConfig { horizon, engine: EngineOptions { seed: 7, ..EngineOptions::default() } };
        let run = run_ofw(&domain, &stream.events, &stream.meta, setting, &config, None)?;
        for r in &run.trace.records {
            worst_support_excess = worst_support_excess.max(r.support_size as i64 - r.t as i64);
        }
    }

    // lazy sampling reproduces the weights of x_50
    let domain = DomainSpec::simplex(6)?;
    let law = TargetLaw::UniformBall { center: vec![1.0 / 6.0; 6], radius: 0.5 };
    let stream = gen_stream(&StreamSpec { kind: StreamKind::Quadratic(law), horizon: 49, seed: 8 }, &domain)?;
    let mut engine = engine_for(&domain, &stream, Setting::StochSmooth, 8)?;
    let x1 = engine.iterate().atom(0).clone();
    let mut outputs = Vec::new();
    for e in &stream.events {
        let r = engine.step(e)?;
        outputs.push((r.t, r.v));
    }
    let x50 = engine.iterate().clone();
    let mut p = vec![0.0; 6];
    for (a, w) in x50.atoms().zip(x50.weights()) {
        p[vertex_index(a)] += w;
    }
    let schedule = *engine.schedule();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws = 100_000;
    let mut counts = [0usize; 6];
    for _ in 0..draws {
        let mut held = x1.clone();
        for (t, v) in &outputs {
            held = sample_play(Some(&held), v, *t, &schedule, &mut rng);
        }
        counts[vertex_index(&held)] += 1;
    }
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / draws as f64).collect();
    let mut multinomial_ok = true;
    let mut worst_sigmas = 0.0_f64;
    for (f, q) in freq.iter().zip(&p) {
        let sd = (q * (1.0 - q) / draws as f64).sqrt();
        if sd == 0.0 {
            multinomial_ok &= (f - q).abs() < 1e-12;
        } else {
            multinomial_ok &= (f - q).abs() <= 3.0 * sd;
            worst_sigmas = worst_sigmas.max((f - q).abs() / sd);
        }
    }
    // the sampled vertex mean is the frequency vector
    let mean_err = max_abs_diff(&freq, &x50.densify());
    verdict(
        worst_support_excess <= 0 && multinomial_ok && mean_err <= 0.01,
        format!(
            "max support - t = {worst_support_excess} over 5 runs; x_50 has {} atoms, replay of {draws} draws \
             within {worst_sigmas:.2}σ, sampled mean within {mean_err:.1e} (ℓ∞)",
            x50.support_size()
        ),
    )
}

fn surrogate_contracts() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let horizon = 100_000usize;
    let mut worst = 0.0_f64;
    for domain in [DomainSpec::simplex(10)?, DomainSpec::ball(20, 1.0)?] {
        let n = domain.dim();
        let d = domain.diameter();
        let l = 1.5;
        let point = |rng: &mut ChaCha8Rng| match domain {
            DomainSpec::Simplex { .. } => simplex_point(rng, n),
            _ => ball_point(rng, n),
        };
        let anchor = match domain {
            DomainSpec::Simplex { .. } => {
                let mut e = vec![0.0; n];
                e[rng.gen_range(0..n)] = 1.0;
                e
            }
            _ => sphere_point(&mut rng, n),
        };
        for _ in 0..1000 {
            let t = rng.gen_range(1..=horizon);
            let g: Vec<f64> = sphere_point(&mut rng, n).into_iter().map(|x| x * l).collect();
            let term = make_adversarial_surrogate(g, t, l, d)?;
            let x = point(&mut rng);
            worst = worst.max(norm(&term.gradient(&x, &anchor)) / l);
        }
        // the running average of surrogates inherits the bound
        let mut state =
            AggregateState::new(&domain, CostFamily::Linear, Setting::Adversarial, &anchor, l, d, None)?;
        for _ in 0..1000 {
            let played = SparseIterate::single(BoundaryAtom::Dense(point(&mut rng)));
            let g: Vec<f64> = sphere_point(&mut rng, n).into_iter().map(|x| x * l).collect();
            state.absorb(&CostEvent::Linear { g }, &played)?;
            let x = SparseIterate::single(BoundaryAtom::Dense(point(&mut rng)));
            worst = worst.max(norm(&state.gradient(&x)?.to_dense()) / l);
        }
    }
    let (l, d) = (1.5, 2.0);
    let mut sum = 0.0;
    let mut sigma_mismatch = 0.0_f64;
    for t in 1..=horizon {
        let s = surrogate_sigma(t, l, d);
        sigma_mismatch = sigma_mismatch.max((s - (l / d) * (t as f64).powf(-0.25)).abs());
        sum += s;
    }
    let cap = 3.0 * (l / d) * (horizon as f64).powf(0.75);
    verdict(
        worst <= 3.0 && sum <= cap && sigma_mismatch < 1e-12,
        format!(
            "max ‖∇f̂_t‖/L = {worst:.3} over 4000 evaluations; Σσ_t = {sum:.1} <= 3(L/D)T^(3/4) = {cap:.1} at T={horizon}"
        ),
    )
}

fn cf_benchmark() -> Result<Verdict> {
    let start = Instant::now();
    let (rows, cols, rank, horizon, seed) = (100, 120, 5, 5000, 11);
    let (records, planted) = planted_ratings(rows, cols, rank, 0.0, horizon, seed)?;
    let entry_err = records.iter().map(|r| (r.rating - planted.entry(r.user, r.item)).abs()).fold(0.0, f64::max);
    let tau = jacobi_singular_values(&planted.to_dense(), rows, cols).iter().sum::<f64>();
    let mut config = BenchConfig::new(rows, cols, tau, horizon);
    config.seed = seed;
    let out = run_cf_compare(&config, &records)?;
    let (ofw, ogd) = (out.ofw.expect("ofw ran"), out.ogd.expect("ogd ran"));
    let window = horizon / 20;
    let losses = ofw.losses();
    let first = losses[..window].iter().sum::<f64>() / window as f64;
    let last = losses[horizon - window..].iter().sum::<f64>() / window as f64;
    let s = &out.summary;
    let summary_agrees = (s.ofw_window_losses[0] - first).abs() < 1e-9 * first.max(1.0)
        && (s.ofw_window_losses.last().unwrap() - last).abs() < 1e-9 * last.max(1.0);
    let (ofw_t, ogd_t) = (ofw.mean_round_time(), ogd.mean_round_time());
    let cache_ok = s.cache_checks >= horizon / CACHE_CHECK_EVERY && s.cache_max_error <= CACHE_CHECK_TOL;
    let fast = within(Duration::from_secs(60), start);
    verdict(
        last <= 0.5 * first && ofw_t < ogd_t && cache_ok && summary_agrees && entry_err == 0.0 && fast,
        format!(
            "planted {rows}x{cols} rank {rank}, tau {tau:.1}, T={horizon}: OFW window loss {first:.3} -> {last:.3}; \
             mean round OFW {:.3} ms vs OGD {:.3} ms; {} cache checks, max error {:.1e}",
            ofw_t.as_secs_f64() * 1e3,
            ogd_t.as_secs_f64() * 1e3,
            s.cache_checks,
            s.cache_max_error
        ),
    )
}

fn bits(xs: &[f64]) -> Vec<u64> {
    xs.iter().map(|x| x.to_bits()).collect()
}

fn determinism() -> Result<Verdict> {
    let mut identical = true;
    let mut compared = 0;
    let cases: Vec<(DomainSpec, StreamKind, Setting)> = vec![
        (
            DomainSpec::ball(5, 1.0)?,
            StreamKind::Quadratic(TargetLaw::UniformBall { center: vec![0.2; 5], radius: 0.5 }),
            Setting::StochSmooth,
        ),
        (DomainSpec::ball(5, 1.0)?, StreamKind::Absolute { center: vec![0.1; 5], width: 0.5 }, Setting::StochNonsmooth),
        (
            DomainSpec::simplex(10)?,
            StreamKind::LinearAdversarial { pattern: AdversarialPattern::RandomSign, scale: 1.0 },
            Setting::Adversarial,
        ),
        (DomainSpec::trace_norm_ball(20, 25, 30.0)?, StreamKind::MatrixEntry { rank: 3, noise: 0.1 }, Setting::StochSmooth),
    ];
    for (domain, kind, setting) in cases {
        let horizon = 1000;
        let run = || -> Result<Vec<f64>> {
            let stream = gen_stream(&StreamSpec { kind: kind.clone(), horizon, seed: 12 }, &domain)?;
            let config = RunConfig { horizon, engine: EngineOptions { seed: 12, ..EngineOptions::default() } };
            Ok(run_ofw(&domain, &stream.events, &stream.meta, setting, &config, None)?.trace.losses())
        };
        identical &= bits(&run()?) == bits(&run()?);
        compared += 1;
    }
    let bench = || -> Result<(Vec<f64>, Vec<f64>)> {
        let (records, _) = planted_ratings(30, 40, 3, 0.1, 800, 13)?;
        let mut config = BenchConfig::new(30, 40, 50.0, 800);
        config.seed = 13;
        let out = run_cf_compare(&config, &records)?;
        Ok((out.ofw.unwrap().losses(), out.ogd.unwrap().losses()))
    };
    let (a, b) = (bench()?, bench()?);
    identical &= bits(&a.0) == bits(&b.0) && bits(&a.1) == bits(&b.1);
    compared += 2;
    verdict(identical, format!("{compared} loss columns compared bitwise across two runs each"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Criterion); 10] = [
        ("gap bound, smooth stochastic", gap_bound_smooth),
        ("adversarial regret bound", regret_bound_adversarial),
        ("regret slopes", regret_slopes),
        ("LMO brute-force equivalence", lmo_equivalence),
        ("trace-norm LMO vs dense SVD", trace_lmo),
        ("smoothing", smoothing_suite),
        ("sparsity and lazy sampling", sparsity_and_sampler),
        ("surrogate contracts", surrogate_contracts),
        ("collaborative-filtering benchmark", cf_benchmark),
        ("determinism", determinism),
    ];
    let failed: Vec<usize> =
        criteria.iter().enumerate().filter(|(k, (name, f))| !report(k + 1, name, *f)).map(|(k, _)| k + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
