use crate::error::{check_finite, OfwError, Result};
use crate::iterate::BoundaryAtom;

/// Greedy linear minimization over the uniform matroid polytope of rank `k`
/// (hull of indicators of all sets of size at most `k`, empty set included).
///
/// Coordinates are visited in ascending cost, lowest index first among
/// equal costs; an index is taken while its cost is negative and fewer than
/// `k` are taken.
pub fn lmo_uniform_matroid(n: usize, k: usize, c: &[f64]) -> Result<BoundaryAtom> {
    if k == 0 || k > n {
        return Err(OfwError::Parameter(format!("rank {k} outside [1, {n}]")));
    }
    if c.len() != n {
        return Err(OfwError::Shape(format!("{} costs for ground set of {n}", c.len())));
    }
    check_finite(c, "matroid cost")?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[a].total_cmp(&c[b]).then(a.cmp(&b)));
    let mut x = vec![0.0; n];
    for &i in order.iter().take_while(|&&i| c[i] < 0.0).take(k) {
        x[i] = 1.0;
    }
    Ok(BoundaryAtom::Dense(x))
}
