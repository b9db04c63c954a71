use crate::error::{check_finite, OfwError, Result};
use crate::iterate::BoundaryAtom;

use super::norm;

const ZERO_COST: f64 = 1e-12;

/// `-r c / ‖c‖`. For a vanishing cost every point is optimal and `r e_1`
/// is returned.
pub fn lmo_ball(c: &[f64], r: f64) -> Result<BoundaryAtom> {
    if c.is_empty() {
        return Err(OfwError::Parameter("empty cost vector".into()));
    }
    if !(r > 0.0) {
        return Err(OfwError::Parameter(format!("radius {r} must be > 0")));
    }
    check_finite(c, "ball cost")?;
    let nc = norm(c);
    if nc < ZERO_COST {
        let mut v = vec![0.0; c.len()];
        v[0] = r;
        return Ok(BoundaryAtom::Dense(v));
    }
    Ok(BoundaryAtom::Dense(c.iter().map(|&x| -r * x / nc).collect()))
}

pub fn project_ball(y: &[f64], r: f64) -> Vec<f64> {
    let ny = norm(y);
    if ny <= r {
        y.to_vec()
    } else {
        y.iter().map(|&v| r * v / ny).collect()
    }
}
