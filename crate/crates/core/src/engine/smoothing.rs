//! δ-smoothing `f̂_δ(x) = E_{u ~ Unif(B)} f(x + δu)` over the unit ball.
//!
//! For the separable absolute-value family the ball average reduces to a
//! one-dimensional integral against the marginal law of a single coordinate
//! of a uniform point in the `n`-ball, whose density is proportional to
//! `(1 - s²)^((n-1)/2)`. For `n = 1` this is the familiar
//! `f̂(z) = (z² + δ²) / (2δ)` on `|z| <= δ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::cost::CostEvent;
use crate::error::{OfwError, Result};

/// Marginal law of one coordinate of a uniform point in the unit `n`-ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMarginal {
    dim: usize,
    /// exponent `(n - 1) / 2`
    power: f64,
    norm: f64,
}

impl BallMarginal {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(OfwError::Parameter("dimension must be >= 1".into()));
        }
        let power = (dim as f64 - 1.0) / 2.0;
        let mut m = Self { dim, power, norm: 1.0 };
        m.norm = 1.0 / (2.0 * m.half_mass(1.0));
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `∫_0^x (1 - s²)^power ds` by the reduction formula.
    fn half_mass(&self, x: f64) -> f64 {
        let x = x.clamp(-1.0, 1.0);
        let w = 1.0 - x * x;
        let (mut acc, mut j, mut wj) = if self.dim % 2 == 1 {
            (x, 0.0, 1.0)
        } else {
            let r = w.sqrt();
            ((x * r + x.asin()) / 2.0, 0.5, r)
        };
        while j < self.power {
            j += 1.0;
            wj *= w;
            acc = (x * wj + 2.0 * j * acc) / (2.0 * j + 1.0);
        }
        acc
    }

    pub fn density(&self, s: f64) -> f64 {
        if s.abs() >= 1.0 {
            return 0.0;
        }
        self.norm * (1.0 - s * s).powf(self.power)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            0.5 + self.norm * self.half_mass(x)
        }
    }

    /// `∫_a^1 s p(s) ds`
    pub fn upper_mean(&self, a: f64) -> f64 {
        if a.abs() >= 1.0 {
            return 0.0;
        }
        let k1 = self.power + 1.0;
        self.norm * (1.0 - a * a).powf(k1) / (2.0 * k1)
    }

    /// `E|z + δ s|`
    pub fn smoothed_abs(&self, z: f64, delta: f64) -> f64 {
        if z.abs() >= delta {
            return z.abs();
        }
        let a = -z / delta;
        z * (1.0 - 2.0 * self.cdf(a)) + 2.0 * delta * self.upper_mean(a)
    }

    /// `d/dz E|z + δ s| = P(s > -z/δ) - P(s < -z/δ)`
    pub fn smoothed_abs_slope(&self, z: f64, delta: f64) -> f64 {
        if z >= delta {
            1.0
        } else if z <= -delta {
            -1.0
        } else {
            1.0 - 2.0 * self.cdf(-z / delta)
        }
    }
}

/// Schedule of smoothing radii `δ_t = coef · t^{-1/3}` with `coef = √n D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    pub delta_coef: f64,
    pub mc_samples: usize,
    pub seed: u64,
}

impl SmoothingConfig {
    pub fn for_domain(dim: usize, diameter: f64, mc_samples: usize, seed: u64) -> Result<Self> {
        if !(diameter > 0.0) || dim == 0 {
            return Err(OfwError::Parameter("smoothing needs dim >= 1 and D > 0".into()));
        }
        Ok(Self { delta_coef: (dim as f64).sqrt() * diameter, mc_samples: mc_samples.max(1), seed })
    }

    pub fn delta(&self, t: usize) -> f64 {
        self.delta_coef * (t as f64).powf(-1.0 / 3.0)
    }
}

/// Uniform draw from the unit ball in `n` dimensions.
pub fn sample_ball<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut u = sample_sphere(rng, n);
    let r = rng.gen::<f64>().powf(1.0 / n as f64);
    u.iter_mut().for_each(|x| *x *= r);
    u
}

/// Uniform draw from the unit sphere in `n` dimensions.
pub fn sample_sphere<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut u: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            u.iter_mut().for_each(|x| *x /= norm);
            return u;
        }
    }
}

/// `f̂_δ(x)`: closed form for the absolute family, otherwise a seeded Monte
/// Carlo average over `samples` uniform ball draws.
pub fn smoothed_value(f: &CostEvent, x: &[f64], delta: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(OfwError::Parameter(format!("smoothing radius {delta} must be > 0")));
    }
    if samples == 0 {
        return Err(OfwError::Parameter("need at least one sample".into()));
    }
    if let CostEvent::Absolute { target } = f {
        if target.len() != x.len() {
            return Err(OfwError::Shape("absolute cost dimension mismatch".into()));
        }
        let m = BallMarginal::new(x.len())?;
        return Ok(x.iter().zip(target).map(|(a, b)| m.smoothed_abs(a - b, delta)).sum());
    }
    if matches!(f, CostEvent::MatrixEntry { .. }) {
        return Err(OfwError::UnsupportedDomain("smoothing of matrix-entry costs".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = x.len();
    let mut acc = 0.0;
    let mut y = vec![0.0; n];
    for _ in 0..samples {
        let u = sample_ball(&mut rng, n);
        for ((yi, xi), ui) in y.iter_mut().zip(x).zip(&u) {
            *yi = xi + delta * ui;
        }
        acc += f.value(&y, 0)?;
    }
    Ok(acc / samples as f64)
}

/// `∇f̂_δ(x)` for the absolute family.
pub fn smoothed_abs_gradient(target: &[f64], x: &[f64], delta: f64, marginal: &BallMarginal) -> Vec<f64> {
    x.iter().zip(target).map(|(a, b)| marginal.smoothed_abs_slope(a - b, delta)).collect()
}
