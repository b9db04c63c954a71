//! Sufficient statistics for the running average `F_t = (1/t) Σ f_τ`.
//!
//! Quadratic, linear, surrogate and matrix-entry costs absorb in O(1) per
//! round (the matrix-entry cache is O(#observed positions) per mix). The
//! smoothed absolute family keeps every past target and costs O(t) per
//! gradient.

use std::collections::HashMap;

use super::cost::{CostEvent, CostFamily};
use super::smoothing::{smoothed_abs_gradient, BallMarginal, SmoothingConfig};
use crate::error::{OfwError, Result};
use crate::iterate::{BoundaryAtom, Shape, SparseIterate};
use crate::oracles::{DomainSpec, Gradient, SparseMatrix};
use crate::schedule::Setting;

/// One linearized, regularized term `g·x + σ‖x - x_1‖²` of the adversarial
/// setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateTerm {
    pub g: Vec<f64>,
    pub sigma: f64,
}

impl SurrogateTerm {
    /// `g + 2σ(x - x_1)`
    pub fn gradient(&self, x: &[f64], anchor: &[f64]) -> Vec<f64> {
        self.g.iter().zip(x.iter().zip(anchor)).map(|(g, (xi, ai))| g + 2.0 * self.sigma * (xi - ai)).collect()
    }
}

/// Builds the round-`t` surrogate from a subgradient at the played point,
/// with `σ_t = (L/D) t^{-1/4}`. Fails when `‖g‖` exceeds the declared
/// Lipschitz constant.
pub fn make_adversarial_surrogate(g: Vec<f64>, t: usize, lipschitz: f64, diameter: f64) -> Result<SurrogateTerm> {
    let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if gn > lipschitz * (1.0 + 1e-6) {
        return Err(OfwError::ContractViolation(format!(
            "subgradient norm {gn} exceeds the declared Lipschitz constant {lipschitz}"
        )));
    }
    Ok(SurrogateTerm { g, sigma: surrogate_sigma(t, lipschitz, diameter) })
}

pub fn surrogate_sigma(t: usize, lipschitz: f64, diameter: f64) -> f64 {
    (lipschitz / diameter) * (t as f64).powf(-0.25)
}

#[derive(Debug, Clone)]
struct EntryStats {
    count: f64,
    rating_sum: f64,
    /// value of the current iterate at this position
    cached: f64,
}

#[derive(Debug, Clone)]
enum Stats {
    Quadratic { mean_target: Vec<f64> },
    Linear { mean_g: Vec<f64> },
    Surrogate { mean_g: Vec<f64>, mean_sigma: f64, anchor: Vec<f64>, lipschitz: f64, diameter: f64 },
    Smoothed { targets: Vec<Vec<f64>>, deltas: Vec<f64>, marginal: BallMarginal, smoothing: SmoothingConfig },
    MatrixEntry { rows: usize, cols: usize, index: HashMap<(usize, usize), usize>, positions: Vec<(usize, usize)>, stats: Vec<EntryStats> },
}

/// Running state from which `∇F_t` is evaluated.
#[derive(Debug, Clone)]
pub struct AggregateState {
    count: usize,
    dim: usize,
    stats: Stats,
}

fn running_mean(mean: &mut [f64], x: &[f64], count: usize) {
    let w = 1.0 / count as f64;
    for (m, v) in mean.iter_mut().zip(x) {
        *m += (v - *m) * w;
    }
}

impl AggregateState {
    /// State for `family` in `setting`. The adversarial setting needs the
    /// anchor `x_1` (flattened), the Lipschitz constant and the diameter; the
    /// non-smooth setting needs a smoothing schedule.
    pub fn new(
        domain: &DomainSpec,
        family: CostFamily,
        setting: Setting,
        anchor: &[f64],
        lipschitz: f64,
        diameter: f64,
        smoothing: Option<SmoothingConfig>,
    ) -> Result<Self> {
        let dim = domain.dim();
        let matrix = matches!(domain.shape(), Shape::Matrix(..));
        let stats = match (setting, family) {
            (_, CostFamily::MatrixEntry) if !matrix => {
                return Err(OfwError::UnsupportedDomain("matrix-entry costs need a trace-norm ball".into()))
            }
            (_, f) if matrix && f != CostFamily::MatrixEntry => {
                return Err(OfwError::UnsupportedDomain(format!("{} costs on a matrix domain", f.name())))
            }
            (Setting::StochSmooth, CostFamily::Quadratic) => Stats::Quadratic { mean_target: vec![0.0; dim] },
            (Setting::StochSmooth, CostFamily::Linear) => Stats::Linear { mean_g: vec![0.0; dim] },
            (Setting::StochSmooth, CostFamily::MatrixEntry) => {
                let Shape::Matrix(rows, cols) = domain.shape() else { unreachable!() };
                Stats::MatrixEntry { rows, cols, index: HashMap::new(), positions: Vec::new(), stats: Vec::new() }
            }
            (Setting::StochSmooth, CostFamily::Absolute) => {
                return Err(OfwError::Configuration(
                    "absolute costs are not smooth; use the stoch_nonsmooth setting".into(),
                ))
            }
            (Setting::StochNonsmooth, CostFamily::Absolute) => {
                let smoothing = smoothing.ok_or_else(|| {
                    OfwError::Configuration("stoch_nonsmooth needs a smoothing schedule".into())
                })?;
                Stats::Smoothed { targets: Vec::new(), deltas: Vec::new(), marginal: BallMarginal::new(dim)?, smoothing }
            }
            (Setting::StochNonsmooth, f) => {
                return Err(OfwError::Configuration(format!(
                    "smoothing is only provided for absolute costs, not {}",
                    f.name()
                )))
            }
            (Setting::Adversarial, CostFamily::MatrixEntry) => {
                return Err(OfwError::Configuration("matrix-entry costs run in the stoch_smooth setting".into()))
            }
            (Setting::Adversarial, _) => {
                if anchor.len() != dim {
                    return Err(OfwError::Shape("anchor dimension mismatch".into()));
                }
                Stats::Surrogate {
                    mean_g: vec![0.0; dim],
                    mean_sigma: 0.0,
                    anchor: anchor.to_vec(),
                    lipschitz,
                    diameter,
                }
            }
        };
        if smoothing.is_some() && !matches!(stats, Stats::Smoothed { .. }) {
            return Err(OfwError::Configuration(format!(
                "smoothing requested for {} costs in the {setting} setting",
                family.name()
            )));
        }
        Ok(Self { count: 0, dim, stats })
    }

    /// Number of absorbed events.
    pub fn rounds(&self) -> usize {
        self.count
    }

    /// Folds `f_t` into the state. `x` is the point `x_t` at which `f_t` was
    /// played.
    pub fn absorb(&mut self, event: &CostEvent, x: &SparseIterate) -> Result<()> {
        let t = self.count + 1;
        match (&mut self.stats, event) {
            (Stats::Quadratic { mean_target }, CostEvent::Quadratic { target }) => {
                check_dim(target, self.dim)?;
                running_mean(mean_target, target, t);
            }
            (Stats::Linear { mean_g }, CostEvent::Linear { g }) => {
                check_dim(g, self.dim)?;
                running_mean(mean_g, g, t);
            }
            (Stats::Surrogate { mean_g, mean_sigma, lipschitz, diameter, .. }, ev) => {
                let dense = x.densify();
                let g = ev.subgradient(&dense, 0)?;
                let term = make_adversarial_surrogate(g, t, *lipschitz, *diameter)?;
                running_mean(mean_g, &term.g, t);
                *mean_sigma += (term.sigma - *mean_sigma) / t as f64;
            }
            (Stats::Smoothed { targets, deltas, smoothing, .. }, CostEvent::Absolute { target }) => {
                check_dim(target, self.dim)?;
                targets.push(target.clone());
                deltas.push(smoothing.delta(t));
            }
            (Stats::MatrixEntry { rows, cols, index, positions, stats }, CostEvent::MatrixEntry { i, j, rating }) => {
                if *i >= *rows || *j >= *cols {
                    return Err(OfwError::Parameter(format!("entry ({i}, {j}) outside {rows}x{cols}")));
                }
                if !rating.is_finite() {
                    return Err(OfwError::Numeric("rating is not finite".into()));
                }
                let k = match index.get(&(*i, *j)) {
                    Some(&k) => k,
                    None => {
                        let cached = x.entry(*i, *j)?;
                        index.insert((*i, *j), positions.len());
                        positions.push((*i, *j));
                        stats.push(EntryStats { count: 0.0, rating_sum: 0.0, cached });
                        positions.len() - 1
                    }
                };
                stats[k].count += 1.0;
                stats[k].rating_sum += rating;
            }
            (_, ev) => {
                return Err(OfwError::Configuration(format!(
                    "{} event does not match the aggregate's cost family",
                    ev.family().name()
                )))
            }
        }
        self.count = t;
        Ok(())
    }

    /// `∇F_t(x)` where `x` is the current iterate.
    pub fn gradient(&self, x: &SparseIterate) -> Result<Gradient> {
        if self.count == 0 {
            return Err(OfwError::Input("gradient requested before any event".into()));
        }
        let t = self.count as f64;
        Ok(match &self.stats {
            Stats::Quadratic { mean_target } => {
                let xd = x.densify();
                Gradient::Dense(xd.iter().zip(mean_target).map(|(a, b)| 2.0 * (a - b)).collect())
            }
            Stats::Linear { mean_g } => Gradient::Dense(mean_g.clone()),
            Stats::Surrogate { mean_g, mean_sigma, anchor, .. } => {
                let xd = x.densify();
                Gradient::Dense(
                    mean_g
                        .iter()
                        .zip(xd.iter().zip(anchor))
                        .map(|(g, (xi, ai))| g + 2.0 * mean_sigma * (xi - ai))
                        .collect(),
                )
            }
            Stats::Smoothed { targets, deltas, marginal, .. } => {
                let xd = x.densify();
                let mut acc = vec![0.0; self.dim];
                for (target, &delta) in targets.iter().zip(deltas) {
                    for (a, g) in acc.iter_mut().zip(smoothed_abs_gradient(target, &xd, delta, marginal)) {
                        *a += g;
                    }
                }
                acc.iter_mut().for_each(|a| *a /= t);
                Gradient::Dense(acc)
            }
            Stats::MatrixEntry { rows, cols, positions, stats, .. } => {
                let mut g = SparseMatrix::with_capacity(*rows, *cols, positions.len());
                for (&(i, j), s) in positions.iter().zip(stats) {
                    let coef = 2.0 * (s.count * s.cached - s.rating_sum) / t;
                    if coef != 0.0 {
                        g.push(i, j, coef)?;
                    }
                }
                Gradient::SparseMatrix(g)
            }
        })
    }

    /// Keeps the entry cache equal to the iterate after
    /// `x <- (1 - alpha) x + alpha v`.
    pub fn on_mix(&mut self, v: &BoundaryAtom, alpha: f64) {
        if let Stats::MatrixEntry { positions, stats, .. } = &mut self.stats {
            let keep = 1.0 - alpha;
            match v {
                BoundaryAtom::RankOne(r) => {
                    for (&(i, j), s) in positions.iter().zip(stats.iter_mut()) {
                        s.cached = keep * s.cached + alpha * r.entry(i, j);
                    }
                }
                BoundaryAtom::Dense(d) => {
                    let cols = d.len() / positions.len().max(1);
                    for (&(i, j), s) in positions.iter().zip(stats.iter_mut()) {
                        s.cached = keep * s.cached + alpha * d[i * cols + j];
                    }
                }
            }
        }
    }

    /// Observed positions and their cached iterate values.
    pub fn cached_entries(&self) -> Vec<((usize, usize), f64)> {
        match &self.stats {
            Stats::MatrixEntry { positions, stats, .. } => {
                positions.iter().zip(stats).map(|(&p, s)| (p, s.cached)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `F_t(x) - F_t(x*_t)` where the minimizer has a closed form: quadratic
    /// and surrogate averages on balls and simplices, linear averages on
    /// vector domains.
    pub fn closed_form_gap(&self, domain: &DomainSpec, x: &SparseIterate) -> Result<Option<f64>> {
        if self.count == 0 {
            return Ok(None);
        }
        let projectable = matches!(domain, DomainSpec::Ball { .. } | DomainSpec::Simplex { .. });
        match &self.stats {
            Stats::Quadratic { mean_target } if projectable => {
                let xd = x.densify();
                let star = domain.project(mean_target)?;
                Ok(Some(sq_dist(&xd, mean_target) - sq_dist(&star, mean_target)))
            }
            Stats::Surrogate { mean_g, mean_sigma, anchor, .. } if projectable && *mean_sigma > 0.0 => {
                // g·x + σ‖x - a‖² = σ‖x - (a - g/2σ)‖² + const
                let center: Vec<f64> = anchor.iter().zip(mean_g).map(|(a, g)| a - g / (2.0 * mean_sigma)).collect();
                let star = domain.project(&center)?;
                let xd = x.densify();
                Ok(Some(mean_sigma * (sq_dist(&xd, &center) - sq_dist(&star, &center))))
            }
            Stats::Linear { mean_g } if !matches!(domain, DomainSpec::TraceNormBall { .. }) => {
                let star = domain.lmo(&Gradient::Dense(mean_g.clone()), &Default::default())?.atom;
                Ok(Some(x.dot(mean_g) - star.dot(mean_g)))
            }
            _ => Ok(None),
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_dim(v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(OfwError::Shape(format!("payload of length {} for dimension {dim}", v.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iterate::RankOne;

    fn point(x: Vec<f64>) -> SparseIterate {
        SparseIterate::single(BoundaryAtom::Dense(x))
    }

    #[test]
    fn quadratic_gradient_of_average() {
        let d = DomainSpec::ball(2, 1.0).unwrap();
        let mut s = AggregateState::new(&d, CostFamily::Quadratic, Setting::StochSmooth, &[], 4.0, d.diameter(), None).unwrap();
        let x = point(vec![0.0, 0.0]);
        s.absorb(&CostEvent::Quadratic { target: vec![1.0, 0.0] }, &x).unwrap();
        s.absorb(&CostEvent::Quadratic { target: vec![0.0, 1.0] }, &x).unwrap();
        assert_eq!(s.gradient(&x).unwrap(), Gradient::Dense(vec![-1.0, -1.0]));
        assert_eq!(s.rounds(), 2);
    }

    #[test]
    fn surrogate_gradient() {
        // hand-set statistics: mean g = (1, 0), mean sigma = 0.25, anchor 0
        let d = DomainSpec::ball(2, 5.0).unwrap();
        let mut s = AggregateState::new(&d, CostFamily::Linear, Setting::Adversarial, &[0.0, 0.0], 1.0, d.diameter(), None).unwrap();
        if let Stats::Surrogate { mean_g, mean_sigma, .. } = &mut s.stats {
            *mean_g = vec![1.0, 0.0];
            *mean_sigma = 0.25;
        }
        s.count = 1;
        assert_eq!(s.gradient(&point(vec![2.0, 0.0])).unwrap(), Gradient::Dense(vec![2.0, 0.0]));
    }

    #[test]
    fn surrogate_sigma_values() {
        assert!((surrogate_sigma(16, 1.0, 2.0) - 0.25).abs() < 1e-15);
        assert_eq!(surrogate_sigma(1, 1.0, 1.0), 1.0);
        assert!(matches!(
            make_adversarial_surrogate(vec![2.0, 0.0], 1, 1.0, 1.0),
            Err(OfwError::ContractViolation(_))
        ));
    }

    #[test]
    fn smoothed_gradient_vanishes_at_kink() {
        let d = DomainSpec::ball(1, 1.0).unwrap();
        let sm = SmoothingConfig { delta_coef: 0.5, mc_samples: 1, seed: 0 };
        let mut s = AggregateState::new(&d, CostFamily::Absolute, Setting::StochNonsmooth, &[], 1.0, d.diameter(), Some(sm)).unwrap();
        let x = point(vec![0.0]);
        s.absorb(&CostEvent::Absolute { target: vec![0.0] }, &x).unwrap();
        assert_eq!(s.gradient(&x).unwrap(), Gradient::Dense(vec![0.0]));
    }

    #[test]
    fn family_setting_mismatches() {
        let ball = DomainSpec::ball(2, 1.0).unwrap();
        let sm = SmoothingConfig { delta_coef: 1.0, mc_samples: 1, seed: 0 };
        assert!(matches!(
            AggregateState::new(&ball, CostFamily::Quadratic, Setting::StochSmooth, &[], 1.0, ball.diameter(), Some(sm)),
            Err(OfwError::Configuration(_))
        ));
        assert!(matches!(
            AggregateState::new(&ball, CostFamily::Quadratic, Setting::StochNonsmooth, &[], 1.0, ball.diameter(), Some(sm)),
            Err(OfwError::Configuration(_))
        ));
        assert!(AggregateState::new(&ball, CostFamily::Absolute, Setting::StochSmooth, &[], 1.0, ball.diameter(), None).is_err());
        assert!(AggregateState::new(&ball, CostFamily::MatrixEntry, Setting::StochSmooth, &[], 1.0, ball.diameter(), None).is_err());
        let mut s = AggregateState::new(&ball, CostFamily::Quadratic, Setting::StochSmooth, &[], 1.0, ball.diameter(), None).unwrap();
        let x = point(vec![0.0, 0.0]);
        assert!(s.absorb(&CostEvent::Linear { g: vec![1.0, 0.0] }, &x).is_err());
        assert!(s.gradient(&x).is_err());
    }

    #[test]
    fn matrix_entry_gradient_matches_dense_recomputation() {
        let d = DomainSpec::trace_norm_ball(2, 2, 1.0).unwrap();
        let mut s = AggregateState::new(&d, CostFamily::MatrixEntry, Setting::StochSmooth, &[], 1.0, d.diameter(), None).unwrap();
        // zero iterate: a zero-scale rank-one atom
        let x = SparseIterate::single(BoundaryAtom::RankOne(RankOne::new(0.0, vec![1.0, 0.0], vec![1.0, 0.0]).unwrap()));
        let events = [
            CostEvent::MatrixEntry { i: 0, j: 1, rating: 3.0 },
            CostEvent::MatrixEntry { i: 1, j: 0, rating: -1.0 },
            CostEvent::MatrixEntry { i: 0, j: 1, rating: 1.5 },
        ];
        for e in &events {
            s.absorb(e, &x).unwrap();
        }
        let g = s.gradient(&x).unwrap().to_dense();
        let xd = x.densify();
        let mut expect = vec![0.0; 4];
        for e in &events {
            for (a, b) in expect.iter_mut().zip(e.subgradient(&xd, 2).unwrap()) {
                *a += b / 3.0;
            }
        }
        assert_eq!(g, expect);
        assert_eq!(g[1], -2.0 * 4.5 / 3.0);
        assert_eq!(g.iter().filter(|v| **v != 0.0).count(), 2);
    }
}
