//! Cost metadata and the step/gap parameter bundle of the online
//! Frank-Wolfe analysis.
//!
//! Smoothness and strong convexity follow the unhalved convention
//! `f(x + y) <= f(x) + ∇f(x)·y + β‖y‖²` (and `>=` with `σ`). Constants from
//! literature that uses the `β/2` convention must be halved before use.

use std::fmt;
use std::str::FromStr;

use crate::error::{OfwError, Result};

/// Lipschitz / smoothness / strong-convexity description of a cost family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostMetadata {
    pub lipschitz: f64,
    pub smoothness: Option<f64>,
    pub strong_convexity: Option<f64>,
    pub dim: usize,
}

impl CostMetadata {
    pub fn new(
        lipschitz: f64,
        smoothness: Option<f64>,
        strong_convexity: Option<f64>,
        dim: usize,
    ) -> Result<Self> {
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(OfwError::Parameter(format!("Lipschitz constant {lipschitz} must be > 0")));
        }
        if smoothness.is_some_and(|b| !(b >= 0.0)) {
            return Err(OfwError::Parameter("smoothness must be >= 0".into()));
        }
        if strong_convexity.is_some_and(|s| !(s >= 0.0)) {
            return Err(OfwError::Parameter("strong convexity must be >= 0".into()));
        }
        Ok(Self { lipschitz, smoothness, strong_convexity, dim })
    }
}

/// Regime the online player runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Setting {
    /// i.i.d. smooth costs; OFW on the running average.
    StochSmooth,
    /// i.i.d. non-smooth costs; OFW on ball-smoothed costs.
    StochNonsmooth,
    /// Arbitrary costs; OFW on linearized, regularized surrogates.
    Adversarial,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::StochSmooth, Setting::StochNonsmooth, Setting::Adversarial];

    pub fn name(self) -> &'static str {
        match self {
            Setting::StochSmooth => "stoch_smooth",
            Setting::StochNonsmooth => "stoch_nonsmooth",
            Setting::Adversarial => "adversarial",
        }
    }

    pub fn is_stochastic(self) -> bool {
        !matches!(self, Setting::Adversarial)
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Setting {
    type Err = OfwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stoch_smooth" | "stoch-smooth" => Ok(Setting::StochSmooth),
            "stoch_nonsmooth" | "stoch-nonsmooth" => Ok(Setting::StochNonsmooth),
            "adversarial" => Ok(Setting::Adversarial),
            other => Err(OfwError::Configuration(format!("unknown setting `{other}`"))),
        }
    }
}

/// Which of the two `(C, d)` pairs of the gap bound is in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapBranch {
    /// `d = (1 + b) / 2`, `C >= max{9D²B, 3LD}`.
    Smooth,
    /// `d = (2 + 2b - s) / 3`, additionally `C >= 36L²/S`.
    StronglyConvex,
}

/// Parameter bundle for one run: costs are `B t^-b`-smooth and
/// `S t^-s`-strongly convex, the gap obeys `Δ_t <= C t^-d`, and the step is
/// `t^-a` with `a = d - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub smooth_coef: f64,
    pub smooth_exp: f64,
    pub convex_coef: f64,
    pub convex_exp: f64,
    pub gap_coef: f64,
    pub gap_exp: f64,
    pub step_exp: f64,
    pub lipschitz: f64,
    pub diameter: f64,
    pub branch: GapBranch,
}

impl Schedule {
    /// Builds a schedule with the smallest admissible gap constant `C`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        smooth_coef: f64,
        smooth_exp: f64,
        convex_coef: f64,
        convex_exp: f64,
        branch: GapBranch,
        lipschitz: f64,
        diameter: f64,
    ) -> Result<Self> {
        Self::with_gap_coef(smooth_coef, smooth_exp, convex_coef, convex_exp, branch, lipschitz, diameter, None)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_gap_coef(
        smooth_coef: f64,
        smooth_exp: f64,
        convex_coef: f64,
        convex_exp: f64,
        branch: GapBranch,
        lipschitz: f64,
        diameter: f64,
        gap_coef: Option<f64>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(OfwError::Parameter(msg));
        if !(smooth_coef >= 0.0) {
            return bad(format!("B = {smooth_coef} must be >= 0"));
        }
        if !(-1.0..=0.5).contains(&smooth_exp) {
            return bad(format!("b = {smooth_exp} outside [-1, 1/2]"));
        }
        if !(convex_coef >= 0.0) {
            return bad(format!("S = {convex_coef} must be >= 0"));
        }
        if !(0.0..=1.0).contains(&convex_exp) {
            return bad(format!("s = {convex_exp} outside [0, 1]"));
        }
        if !(lipschitz > 0.0) {
            return bad(format!("L = {lipschitz} must be > 0"));
        }
        if !(diameter > 0.0) {
            return bad(format!("D = {diameter} must be > 0"));
        }
        let (b, s, l, d) = (smooth_exp, convex_exp, lipschitz, diameter);
        let gap_exp = match branch {
            GapBranch::Smooth => (1.0 + b) / 2.0,
            GapBranch::StronglyConvex => {
                if !(convex_coef > 0.0) {
                    return bad("the strongly convex branch needs S > 0".into());
                }
                (2.0 + 2.0 * b - s) / 3.0
            }
        };
        if !(gap_exp > 0.0 && gap_exp <= 1.0) {
            return bad(format!("d = {gap_exp} outside (0, 1]"));
        }
        let mut min_c = (9.0 * d * d * smooth_coef).max(3.0 * l * d);
        if branch == GapBranch::StronglyConvex {
            min_c = min_c.max(36.0 * l * l / convex_coef);
        }
        let gap_coef = match gap_coef {
            None => min_c,
            Some(c) if c >= min_c => c,
            Some(c) => return bad(format!("C = {c} below the admissible minimum {min_c}")),
        };
        Ok(Self {
            smooth_coef,
            smooth_exp: b,
            convex_coef,
            convex_exp: s,
            gap_coef,
            gap_exp,
            step_exp: gap_exp - b,
            lipschitz: l,
            diameter: d,
            branch,
        })
    }

    /// Parameters used by each setting.
    pub fn from_setting(meta: &CostMetadata, diameter: f64, setting: Setting) -> Result<Self> {
        let l = meta.lipschitz;
        let d = diameter;
        if !(d > 0.0) {
            return Err(OfwError::Parameter(format!("diameter {d} must be > 0")));
        }
        match setting {
            Setting::StochSmooth => {
                let beta = meta.smoothness.ok_or_else(|| {
                    OfwError::Configuration("stoch_smooth needs a smoothness bound".into())
                })?;
                Self::new(beta, 0.0, 0.0, 0.0, GapBranch::Smooth, l, d)
            }
            Setting::StochNonsmooth => {
                let root_n = (meta.dim as f64).sqrt();
                Self::new(root_n * l / d, -1.0 / 3.0, 0.0, 0.0, GapBranch::Smooth, l, d)
            }
            Setting::Adversarial => {
                Self::new(l / d, 0.25, l / d, 0.25, GapBranch::StronglyConvex, l, d)
            }
        }
    }

    /// Mixing weight `t^-a` of round `t`.
    pub fn step(&self, t: usize) -> f64 {
        (t as f64).powf(-self.step_exp)
    }

    /// Gap bound `C t^-d`.
    pub fn gap_bound(&self, t: usize) -> f64 {
        self.gap_coef * (t as f64).powf(-self.gap_exp)
    }
}
