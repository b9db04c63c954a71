use nalgebra::{DMatrix, DVector};

use crate::error::{check_finite, OfwError, Result};
use crate::iterate::{BoundaryAtom, RankOne};

use super::power::{power_iteration_top_pair, MatrixOp};
use super::simplex::project_simplex_scaled;
use super::{LmoOptions, LmoOutput};

/// Linear minimization over `{X : ‖X‖_tr <= tau}`: the rank-one matrix
/// `-tau u v^T` built from the top singular pair of the gradient.
///
/// A zero gradient yields `-tau e_1 e_1^T`.
pub fn lmo_trace_ball<M: MatrixOp + ?Sized>(tau: f64, g: &M, opts: &LmoOptions) -> Result<LmoOutput> {
    if !(tau > 0.0) {
        return Err(OfwError::Parameter(format!("trace bound {tau} must be > 0")));
    }
    let (m, n) = (g.rows(), g.cols());
    if g.is_zero() {
        let mut u = vec![0.0; m];
        let mut v = vec![0.0; n];
        u[0] = 1.0;
        v[0] = 1.0;
        return Ok(LmoOutput { atom: BoundaryAtom::RankOne(RankOne::new(-tau, u, v)?), converged: true });
    }
    let pair = power_iteration_top_pair(g, opts.power_tol, opts.power_max_iters, opts.seed)?;
    Ok(LmoOutput {
        atom: BoundaryAtom::RankOne(RankOne::new(-tau, pair.u, pair.v)?),
        converged: pair.converged,
    })
}

fn to_matrix(y: &[f64], m: usize, n: usize) -> Result<DMatrix<f64>> {
    if y.len() != m * n {
        return Err(OfwError::Shape(format!("{} values for {m}x{n}", y.len())));
    }
    check_finite(y, "matrix")?;
    Ok(DMatrix::from_row_slice(m, n, y))
}

/// Singular values of a row-major `m x n` matrix, descending.
pub fn singular_values(y: &[f64], m: usize, n: usize) -> Result<Vec<f64>> {
    let a = to_matrix(y, m, n)?;
    let s = a
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| OfwError::Numeric("SVD did not converge".into()))?
        .singular_values;
    let mut s: Vec<f64> = s.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

pub fn nuclear_norm(y: &[f64], m: usize, n: usize) -> Result<f64> {
    Ok(singular_values(y, m, n)?.iter().sum())
}

/// Euclidean projection onto the trace-norm ball through a full SVD: the
/// singular values are projected onto `{s >= 0, sum s <= tau}`.
pub fn project_trace_ball(y: &[f64], m: usize, n: usize, tau: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(OfwError::Parameter(format!("trace bound {tau} must be > 0")));
    }
    let a = to_matrix(y, m, n)?;
    let svd = a
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| OfwError::Numeric("SVD did not converge".into()))?;
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().sum::<f64>() <= tau {
        return Ok(y.to_vec());
    }
    let shrunk = DVector::from_vec(project_simplex_scaled(&s, tau)?);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let x = u * DMatrix::from_diagonal(&shrunk) * v_t;
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        out.extend((0..n).map(|j| x[(i, j)]));
    }
    Ok(out)
}
