use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ofw::baselines::{ogd_run, OgdConfig};
use ofw::bench::{load_ratings, planted_ratings, run_cf_compare, Algorithms, BenchConfig};
use ofw::checks::{bounds_checks, lmo_checks, CheckOutcome};
use ofw::engine::EngineOptions;
use ofw::error::OfwError;
use ofw::harness::{
    empirical_regret, gen_stream, score_ofw, tail_slope, AdversarialPattern, RegretMode, StreamKind, StreamSpec,
    TargetLaw,
};
use ofw::oracles::{DomainSpec, FlowGraph, DEFAULT_POWER_TOL};
use ofw::schedule::Setting;
use ofw::trace::RegretTrace;

#[derive(Parser)]
#[command(name = "ofw", version, about = "Projection-free online convex optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on a generated stream and write its trace.
    Run(RunArgs),
    /// Online matrix completion: OFW against OGD on a trace-norm ball.
    Compare(CompareArgs),
    /// Check every linear oracle against brute force.
    LmoCheck(LmoCheckArgs),
    /// Check the gap and adversarial regret bounds.
    BoundsCheck(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Simplex,
    Ball,
    Flow,
    Matroid,
    Trace,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum AlgoArg {
    Ofw,
    Ogd,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgosArg {
    Ofw,
    Ogd,
    Both,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    domain: DomainArg,
    /// stoch_smooth, stoch_nonsmooth or adversarial
    #[arg(long)]
    setting: Setting,
    #[arg(long = "T")]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Norm of the adversarial linear costs.
    #[arg(long = "L")]
    lipschitz: Option<f64>,
    /// Diameter bound for the schedules (at least the domain's diameter).
    #[arg(long = "D")]
    diameter: Option<f64>,
    /// Dimension of vector domains.
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Rank bound of the uniform matroid.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// DAG file for the flow domain.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    rows: usize,
    #[arg(long, default_value_t = 30)]
    cols: usize,
    #[arg(long, default_value_t = 10.0)]
    tau: f64,
    #[arg(long, default_value_t = DEFAULT_POWER_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    mc_samples: usize,
    /// alternating, random_sign or drifting
    #[arg(long, default_value = "random_sign")]
    pattern: AdversarialPattern,
    #[arg(long, value_enum, default_value = "ofw")]
    algo: AlgoArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// `user,item,rating` file; a planted low-rank stream is used otherwise.
    #[arg(long)]
    ratings: Option<PathBuf>,
    /// Trace bound; defaults to the planted trace norm for synthetic data.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "T", default_value_t = 5000)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_POWER_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    rows: usize,
    #[arg(long, default_value_t = 120)]
    cols: usize,
    #[arg(long, default_value_t = 5)]
    rank: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, value_enum, default_value = "both")]
    algos: AlgosArg,
    /// Run the players on separate threads.
    #[arg(long)]
    parallel: bool,
    /// OFW trace path; the OGD trace goes next to it with an `.ogd` suffix.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LmoCheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_POWER_TOL)]
    tol: f64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long = "T", default_value_t = 4096)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn build_domain(a: &RunArgs) -> Result<DomainSpec, OfwError> {
    match a.domain {
        DomainArg::Simplex => DomainSpec::simplex(a.n),
        DomainArg::Ball => DomainSpec::ball(a.n, a.radius),
        DomainArg::Matroid => DomainSpec::uniform_matroid(a.n, a.k),
        DomainArg::Trace => DomainSpec::trace_norm_ball(a.rows, a.cols, a.tau),
        DomainArg::Flow => {
            let path = a.graph.as_ref().ok_or_else(|| OfwError::Configuration("--domain flow needs --graph".into()))?;
            Ok(DomainSpec::FlowPolytope(FlowGraph::parse(&fs::read_to_string(path)?)?))
        }
    }
}

/// A point of the domain near its middle, used as the center of stochastic
/// targets.
fn interior_center(domain: &DomainSpec) -> Vec<f64> {
    let n = domain.dim();
    match domain {
        DomainSpec::Simplex { .. } => vec![1.0 / n as f64; n],
        DomainSpec::Ball { radius, .. } => (0..n).map(|i| if i == 0 { 0.3 * radius } else { 0.0 }).collect(),
        _ => vec![0.0; n],
    }
}

fn build_stream_kind(a: &RunArgs, domain: &DomainSpec) -> Result<StreamKind, OfwError> {
    if matches!(domain, DomainSpec::TraceNormBall { .. }) {
        return match a.setting {
            Setting::StochSmooth => Ok(StreamKind::MatrixEntry { rank: 2.min(a.rows.min(a.cols)), noise: 0.1 }),
            s => Err(OfwError::Configuration(format!("the trace domain runs matrix-entry costs in stoch_smooth, not {s}"))),
        };
    }
    Ok(match a.setting {
        Setting::StochSmooth => {
            if matches!(domain, DomainSpec::FlowPolytope(_) | DomainSpec::UniformMatroid { .. }) {
                return Err(OfwError::Configuration(format!(
                    "stochastic quadratic streams need a ball or simplex, not {}",
                    domain.name()
                )));
            }
            StreamKind::Quadratic(TargetLaw::UniformBall { center: interior_center(domain), radius: 0.5 })
        }
        Setting::StochNonsmooth => {
            if matches!(domain, DomainSpec::FlowPolytope(_) | DomainSpec::UniformMatroid { .. }) {
                return Err(OfwError::Configuration(format!(
                    "stochastic absolute streams need a ball or simplex, not {}",
                    domain.name()
                )));
            }
            StreamKind::Absolute { center: interior_center(domain), width: 0.5 }
        }
        Setting::Adversarial => {
            StreamKind::LinearAdversarial { pattern: a.pattern, scale: a.lipschitz.unwrap_or(1.0) }
        }
    })
}

fn write_trace(trace: &RegretTrace, out: &Option<PathBuf>) -> Result<(), OfwError> {
    if let Some(path) = out {
        trace.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<bool, OfwError> {
    let domain = build_domain(&a)?;
    let spec = StreamSpec { kind: build_stream_kind(&a, &domain)?, horizon: a.horizon, seed: a.seed };
    let mut stream = gen_stream(&spec, &domain)?;
    if let Some(l) = a.lipschitz {
        if l < stream.meta.lipschitz {
            return Err(OfwError::Parameter(format!(
                "--L {l} is below the stream's Lipschitz constant {}",
                stream.meta.lipschitz
            )));
        }
        stream.meta.lipschitz = l;
    }
    let trace = match a.algo {
        AlgoArg::Ofw => {
            let engine = EngineOptions {
                seed: a.seed,
                power_tol: a.tol,
                mc_samples: a.mc_samples,
                diameter: a.diameter,
                ..EngineOptions::default()
            };
            let mode = if a.setting.is_stochastic() && stream.expected.is_some() {
                RegretMode::Expected
            } else {
                RegretMode::Empirical
            };
            let scored = score_ofw(&domain, &stream, a.setting, a.horizon, engine, mode)?;
            println!("regret_upper={}", scored.regret_upper);
            scored.trace
        }
        AlgoArg::Ogd => {
            let mut cfg = OgdConfig::standard(&domain, &stream.meta)?;
            if let Some(d) = a.diameter {
                cfg.eta_coef = d / stream.meta.lipschitz;
            }
            let mut run = ogd_run(&domain, &stream.events, &cfg, a.horizon)?;
            let (regret, upper) = empirical_regret(&domain, &stream, &run.trace.losses())?;
            run.trace.set_regret(&regret)?;
            println!("regret_upper={upper}");
            run.trace
        }
    };
    if let Some(r) = trace.final_regret() {
        println!("final_regret={r}");
    }
    let regret: Vec<f64> = trace.records.iter().filter_map(|r| r.cum_regret).collect();
    if let Ok(s) = tail_slope(&regret, 0.1) {
        println!("tail_slope={s}");
    }
    println!("family={}", stream.family.name());
    println!("total_ns={}", trace.total_elapsed().as_nanos());
    println!("lmo_warnings={}", trace.lmo_warnings);
    write_trace(&trace, &a.out)?;
    Ok(true)
}

fn ogd_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    out.with_file_name(format!("{stem}.ogd{ext}"))
}

fn cmd_compare(a: CompareArgs) -> Result<bool, OfwError> {
    let (records, rows, cols, tau) = match &a.ratings {
        Some(path) => {
            let set = load_ratings(path)?;
            let tau = a.tau.ok_or_else(|| OfwError::Configuration("--tau is required with --ratings".into()))?;
            (set.records, set.rows, set.cols, tau)
        }
        None => {
            let (records, planted) = planted_ratings(a.rows, a.cols, a.rank, a.noise, a.horizon, a.seed)?;
            let tau = match a.tau {
                Some(t) => t,
                None => planted.trace_norm()?,
            };
            (records, a.rows, a.cols, tau)
        }
    };
    let mut cfg = BenchConfig::new(rows, cols, tau, a.horizon);
    cfg.seed = a.seed;
    cfg.power_tol = a.tol;
    cfg.parallel = a.parallel;
    cfg.algorithms = match a.algos {
        AlgosArg::Ofw => Algorithms::Ofw,
        AlgosArg::Ogd => Algorithms::Ogd,
        AlgosArg::Both => Algorithms::Both,
    };
    if let Some(out) = &a.out {
        cfg.ofw_trace = Some(out.clone());
        cfg.ogd_trace = Some(ogd_path(out));
    }
    let out = run_cf_compare(&cfg, &records)?;
    println!("rows={rows}");
    println!("cols={cols}");
    println!("tau={tau}");
    println!("T={}", a.horizon);
    for line in out.summary.lines() {
        println!("{line}");
    }
    Ok(true)
}

fn report(outcomes: &[CheckOutcome]) -> bool {
    for o in outcomes {
        println!("{o}");
    }
    outcomes.iter().all(|o| o.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::LmoCheck(a) => lmo_checks(a.seed, a.trials, a.tol).map(|o| report(&o)),
        Command::BoundsCheck(a) => bounds_checks(a.horizon, a.seed).map(|o| report(&o)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                OfwError::ContractViolation(_) | OfwError::Numeric(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
