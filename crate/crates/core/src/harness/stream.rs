//! Seeded cost-stream generators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::engine::{sample_ball, CostEvent, CostFamily};
use crate::error::{OfwError, Result};
use crate::iterate::Shape;
use crate::oracles::{singular_values, DomainSpec};
use crate::schedule::CostMetadata;

/// Law of the quadratic targets `y_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetLaw {
    /// Uniform on the ball of radius `radius` around `center`.
    UniformBall { center: Vec<f64>, radius: f64 },
    /// Uniform over a finite list of points.
    Discrete(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversarialPattern {
    /// `g_t = e_{(t-1) mod n}`
    Alternating,
    /// independent uniform signs on every coordinate, scaled to unit norm
    RandomSign,
    /// a unit direction rotating through all coordinates four times over
    /// the horizon
    Drifting,
}

impl AdversarialPattern {
    pub const ALL: [AdversarialPattern; 3] =
        [AdversarialPattern::Alternating, AdversarialPattern::RandomSign, AdversarialPattern::Drifting];

    pub fn name(self) -> &'static str {
        match self {
            AdversarialPattern::Alternating => "alternating",
            AdversarialPattern::RandomSign => "random_sign",
            AdversarialPattern::Drifting => "drifting",
        }
    }
}

impl fmt::Display for AdversarialPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversarialPattern {
    type Err = OfwError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "alternating" => Ok(AdversarialPattern::Alternating),
            "random_sign" | "random" => Ok(AdversarialPattern::RandomSign),
            "drifting" => Ok(AdversarialPattern::Drifting),
            other => Err(OfwError::Parameter(format!("unknown adversarial pattern '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StreamKind {
    Quadratic(TargetLaw),
    /// Targets with independent coordinates uniform on `center_i ± width`.
    Absolute { center: Vec<f64>, width: f64 },
    /// Linear costs of norm `scale`.
    LinearAdversarial { pattern: AdversarialPattern, scale: f64 },
    /// Uniformly chosen entries of a planted `rows x cols` matrix
    /// `U Vᵀ` with Gaussian factors of the given rank, plus Gaussian noise.
    MatrixEntry { rank: usize, noise: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpec {
    pub kind: StreamKind,
    pub horizon: usize,
    pub seed: u64,
}

/// `f*(x) = E f_t(x)` for the stochastic families.
#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedCost {
    /// `‖x - mean‖² + spread`
    Quadratic { mean: Vec<f64>, spread: f64 },
    /// `Σ_i E|x_i - y_i|`, `y_i` uniform on `center_i ± width`
    Absolute { center: Vec<f64>, width: f64 },
}

impl ExpectedCost {
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        match self {
            ExpectedCost::Quadratic { mean, spread } => {
                check_len(x, mean.len())?;
                Ok(x.iter().zip(mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() + spread)
            }
            ExpectedCost::Absolute { center, width } => {
                check_len(x, center.len())?;
                Ok(x.iter().zip(center).map(|(a, c)| uniform_abs_mean(a - c, *width)).sum())
            }
        }
    }

    /// `argmin_K f*` and its value.
    pub fn minimizer(&self, domain: &DomainSpec) -> Result<(Vec<f64>, f64)> {
        let x = match self {
            ExpectedCost::Quadratic { mean, .. } => domain.project(mean)?,
            // separable and minimized coordinatewise at the center, which
            // the generator keeps inside the domain
            ExpectedCost::Absolute { center, .. } => center.clone(),
        };
        let v = self.value(&x)?;
        Ok((x, v))
    }
}

/// `E|z - w U|` for `U` uniform on `[-1, 1]`.
fn uniform_abs_mean(z: f64, width: f64) -> f64 {
    if width == 0.0 || z.abs() >= width {
        z.abs()
    } else {
        (z * z + width * width) / (2.0 * width)
    }
}

fn check_len(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(OfwError::Shape(format!("point of length {} for dimension {n}", x.len())));
    }
    Ok(())
}

/// Factors of a planted matrix, row-major `rows x rank` and `cols x rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedMatrix {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl PlantedMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let r = self.rank;
        self.u[i * r..(i + 1) * r].iter().zip(&self.v[j * r..(j + 1) * r]).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        (0..self.rows).flat_map(|i| (0..self.cols).map(move |j| (i, j))).map(|(i, j)| self.entry(i, j)).collect()
    }

    pub fn trace_norm(&self) -> Result<f64> {
        Ok(singular_values(&self.to_dense(), self.rows, self.cols)?.iter().sum())
    }
}

/// A generated stream with everything needed to score a run on it.
#[derive(Debug, Clone)]
pub struct Stream {
    pub events: Vec<CostEvent>,
    pub family: CostFamily,
    pub meta: CostMetadata,
    /// Present for the stochastic vector families.
    pub expected: Option<ExpectedCost>,
    pub planted: Option<PlantedMatrix>,
}

fn normalized(mut g: Vec<f64>, scale: f64) -> Vec<f64> {
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        g.iter_mut().for_each(|x| *x = 0.0);
        g[0] = scale;
    } else {
        g.iter_mut().for_each(|x| *x *= scale / norm);
    }
    g
}

/// Generates `spec.horizon` events on `domain`; deterministic in
/// `spec.seed`.
pub fn gen_stream(spec: &StreamSpec, domain: &DomainSpec) -> Result<Stream> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = domain.dim();
    let horizon = spec.horizon;
    let vector_only = || -> Result<()> {
        match domain.shape() {
            Shape::Vector(_) => Ok(()),
            Shape::Matrix(..) => Err(OfwError::UnsupportedDomain("vector stream on a matrix domain".into())),
        }
    };
    match &spec.kind {
        StreamKind::Quadratic(law) => {
            vector_only()?;
            let (events, bound, mean, spread): (Vec<_>, f64, Vec<f64>, f64) = match law {
                TargetLaw::UniformBall { center, radius } => {
                    check_len(center, n)?;
                    if !(*radius >= 0.0) {
                        return Err(OfwError::Parameter("target radius must be >= 0".into()));
                    }
                    let events = (0..horizon)
                        .map(|_| {
                            let u = sample_ball(&mut rng, n);
                            CostEvent::Quadratic { target: center.iter().zip(&u).map(|(c, x)| c + radius * x).collect() }
                        })
                        .collect();
                    let cn = center.iter().map(|x| x * x).sum::<f64>().sqrt();
                    // E‖u‖² = n / (n + 2) for u uniform in the unit n-ball
                    let spread = radius * radius * n as f64 / (n as f64 + 2.0);
                    (events, cn + radius, center.clone(), spread)
                }
                TargetLaw::Discrete(points) => {
                    if points.is_empty() {
                        return Err(OfwError::Parameter("empty target support".into()));
                    }
                    for p in points {
                        check_len(p, n)?;
                    }
                    let k = points.len() as f64;
                    let mut mean = vec![0.0; n];
                    for p in points {
                        mean.iter_mut().zip(p).for_each(|(m, x)| *m += x / k);
                    }
                    let spread = points
                        .iter()
                        .map(|p| p.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                        .sum::<f64>()
                        / k;
                    let bound = points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
                    let events = (0..horizon)
                        .map(|_| CostEvent::Quadratic { target: points.choose(&mut rng).unwrap().clone() })
                        .collect();
                    (events, bound, mean, spread)
                }
            };
            Ok(Stream {
                events,
                family: CostFamily::Quadratic,
                meta: CostFamily::Quadratic.metadata(domain, bound)?,
                expected: Some(ExpectedCost::Quadratic { mean, spread }),
                planted: None,
            })
        }
        StreamKind::Absolute { center, width } => {
            vector_only()?;
            check_len(center, n)?;
            if !(*width >= 0.0) {
                return Err(OfwError::Parameter("target width must be >= 0".into()));
            }
            if !domain.contains(center, 1e-12)? {
                return Err(OfwError::Parameter("absolute target center must lie in the domain".into()));
            }
            let events = (0..horizon)
                .map(|_| CostEvent::Absolute {
                    target: center.iter().map(|c| c + width * rng.gen_range(-1.0..=1.0)).collect(),
                })
                .collect();
            Ok(Stream {
                events,
                family: CostFamily::Absolute,
                meta: CostFamily::Absolute.metadata(domain, 0.0)?,
                expected: Some(ExpectedCost::Absolute { center: center.clone(), width: *width }),
                planted: None,
            })
        }
        StreamKind::LinearAdversarial { pattern, scale } => {
            vector_only()?;
            if !(*scale > 0.0) {
                return Err(OfwError::Parameter("linear scale must be > 0".into()));
            }
            let period = (horizon as f64 / 4.0).max(1.0);
            let events = (1..=horizon)
                .map(|t| {
                    let g = match pattern {
                        AdversarialPattern::Alternating => {
                            let mut g = vec![0.0; n];
                            g[(t - 1) % n] = 1.0;
                            g
                        }
                        AdversarialPattern::RandomSign => {
                            (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
                        }
                        AdversarialPattern::Drifting => {
                            let theta = 2.0 * PI * t as f64 / period;
                            (0..n).map(|i| (theta + PI * i as f64 / n as f64).cos()).collect()
                        }
                    };
                    CostEvent::Linear { g: normalized(g, *scale) }
                })
                .collect();
            Ok(Stream {
                events,
                family: CostFamily::Linear,
                meta: CostFamily::Linear.metadata(domain, *scale)?,
                expected: None,
                planted: None,
            })
        }
        StreamKind::MatrixEntry { rank, noise } => {
            let Shape::Matrix(rows, cols) = domain.shape() else {
                return Err(OfwError::UnsupportedDomain("matrix-entry streams need a trace-norm ball".into()));
            };
            if *rank == 0 || *rank > rows.min(cols) {
                return Err(OfwError::Parameter(format!("rank {rank} for a {rows}x{cols} matrix")));
            }
            let mut gauss = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect() };
            let planted = PlantedMatrix { rows, cols, rank: *rank, u: gauss(rows * rank), v: gauss(cols * rank) };
            let mut events = Vec::with_capacity(horizon);
            let mut bound: f64 = 0.0;
            for _ in 0..horizon {
                let i = rng.gen_range(0..rows);
                let j = rng.gen_range(0..cols);
                let eps: f64 = rng.sample(StandardNormal);
                let rating = planted.entry(i, j) + noise * eps;
                bound = bound.max(rating.abs());
                events.push(CostEvent::MatrixEntry { i, j, rating });
            }
            Ok(Stream {
                events,
                family: CostFamily::MatrixEntry,
                meta: CostFamily::MatrixEntry.metadata(domain, bound)?,
                expected: None,
                planted: Some(planted),
            })
        }
    }
}
