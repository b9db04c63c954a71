use crate::error::{check_finite, OfwError, Result};
use crate::iterate::BoundaryAtom;

use super::argmin_lowest;

/// Vertex `e_i` of the probability simplex with `i = argmin c_i`.
pub fn lmo_simplex(c: &[f64]) -> Result<BoundaryAtom> {
    if c.is_empty() {
        return Err(OfwError::Parameter("empty cost vector".into()));
    }
    check_finite(c, "simplex cost")?;
    let mut v = vec![0.0; c.len()];
    v[argmin_lowest(c)] = 1.0;
    Ok(BoundaryAtom::Dense(v))
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(y: &[f64]) -> Result<Vec<f64>> {
    project_simplex_scaled(y, 1.0)
}

/// Euclidean projection onto `{x >= 0, sum x = z}` by sorting and
/// thresholding.
pub fn project_simplex_scaled(y: &[f64], z: f64) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(OfwError::Parameter("empty vector".into()));
    }
    check_finite(y, "projection input")?;
    if !(z > 0.0) {
        return Err(OfwError::Parameter(format!("simplex scale {z} must be > 0")));
    }
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - z) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    Ok(y.iter().map(|&v| (v - theta).max(0.0)).collect())
}
