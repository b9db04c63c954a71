//! Lazy play: keep one boundary point and replace it by the new oracle
//! output with probability `t^{-a}`. The held point is then distributed
//! according to the iterate's weights.

use std::sync::Arc;

use rand::Rng;

use crate::iterate::BoundaryAtom;
use crate::schedule::Schedule;

/// Returns `v_new` with probability `t^{-a}` (always at `t = 1`), else the
/// previously held atom.
pub fn sample_play<R: Rng + ?Sized>(
    prev: Option<&BoundaryAtom>,
    v_new: &BoundaryAtom,
    t: usize,
    schedule: &Schedule,
    rng: &mut R,
) -> BoundaryAtom {
    match prev {
        Some(p) if !replace(t, schedule, rng) => p.clone(),
        _ => v_new.clone(),
    }
}

fn replace<R: Rng + ?Sized>(t: usize, schedule: &Schedule, rng: &mut R) -> bool {
    let p = schedule.step(t);
    p >= 1.0 || rng.gen::<f64>() < p
}

/// Stateful form of [`sample_play`] that also remembers the round at which
/// the held atom was produced.
#[derive(Debug, Clone, Default)]
pub struct LazySampler {
    held: Option<(usize, Arc<BoundaryAtom>)>,
    switches: usize,
}

impl LazySampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers the round-`t` oracle output. Returns whether it was taken.
    pub fn offer<R: Rng + ?Sized>(&mut self, v_new: Arc<BoundaryAtom>, t: usize, schedule: &Schedule, rng: &mut R) -> bool {
        if self.held.is_none() || replace(t, schedule, rng) {
            self.held = Some((t, v_new));
            self.switches += 1;
            true
        } else {
            false
        }
    }

    pub fn held(&self) -> Option<&BoundaryAtom> {
        self.held.as_ref().map(|(_, a)| a.as_ref())
    }

    /// Round at which the held atom was produced.
    pub fn origin(&self) -> Option<usize> {
        self.held.as_ref().map(|(t, _)| *t)
    }

    /// Number of times the played point changed.
    pub fn switches(&self) -> usize {
        self.switches
    }
}
