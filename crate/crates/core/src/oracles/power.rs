use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{OfwError, Result};

/// Matrix-vector access used by the power iteration.
pub trait MatrixOp {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y = A^T x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
    fn is_zero(&self) -> bool;
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(OfwError::Shape(format!("{} values for {rows}x{cols}", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl MatrixOp for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (&xi, row) in x.iter().zip(self.data.chunks_exact(self.cols)) {
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += a * xi;
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// Coordinate-format sparse matrix. Repeated positions add up.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_idx: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, ..Default::default() }
    }

    pub fn with_capacity(rows: usize, cols: usize, cap: usize) -> Self {
        Self {
            rows,
            cols,
            row_idx: Vec::with_capacity(cap),
            col_idx: Vec::with_capacity(cap),
            vals: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i >= self.rows || j >= self.cols {
            return Err(OfwError::Parameter(format!("entry ({i}, {j}) outside {}x{}", self.rows, self.cols)));
        }
        self.row_idx.push(i);
        self.col_idx.push(j);
        self.vals.push(v);
        Ok(())
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.row_idx
            .iter()
            .zip(&self.col_idx)
            .zip(&self.vals)
            .map(|((&i, &j), &v)| (i, j, v))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for (i, j, v) in self.entries() {
            out[i * self.cols + j] += v;
        }
        out
    }
}

impl MatrixOp for SparseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, j, v) in self.entries() {
            y[i] += v * x[j];
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, j, v) in self.entries() {
            y[j] += v * x[i];
        }
    }

    fn is_zero(&self) -> bool {
        self.vals.iter().all(|&v| v == 0.0)
    }
}

/// Approximate top singular triple `(sigma, u, v)` with `G v ≈ sigma u`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopPair {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    /// False when `max_iters` ran out; the triple is then the last iterate.
    pub converged: bool,
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// Convergence test on the increasing sequence of singular value
/// estimates. Near convergence the increments shrink geometrically with
/// ratio `r = diff / prev_diff`, leaving `diff * r / (1 - r)` to go. The
/// ratio must also have settled (two estimates within 5%), which guards
/// against stopping on a plateau before the top direction has taken over.
#[derive(Debug, Default)]
struct Extrapolated {
    prev_diff: Option<f64>,
    prev_ratio: Option<f64>,
}

impl Extrapolated {
    fn done(&mut self, diff: f64, sigma: f64, tol: f64) -> bool {
        if diff.abs() <= 4.0 * f64::EPSILON * sigma {
            return true;
        }
        let ratio = self.prev_diff.filter(|&pd| pd > 0.0).map(|pd| diff / pd);
        let settled = matches!((ratio, self.prev_ratio), (Some(a), Some(b)) if (a - b).abs() <= 0.05 * a.max(b));
        let done = match ratio {
            Some(r) if diff >= 0.0 && r < 1.0 => settled && diff.max(diff * r / (1.0 - r)) < tol * sigma,
            _ => false,
        };
        self.prev_diff = Some(diff);
        if ratio.is_some() {
            self.prev_ratio = ratio;
        }
        done
    }
}

/// Power iteration on `G^T G` from a seeded Gaussian start. Stops once
/// successive singular value estimates differ by less than `tol` relatively
/// and the extrapolated remaining error is below `tol` as well.
pub fn power_iteration_top_pair<M: MatrixOp + ?Sized>(
    g: &M,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<TopPair> {
    if !(tol > 0.0) {
        return Err(OfwError::Parameter(format!("tolerance {tol} must be > 0")));
    }
    let (m, n) = (g.rows(), g.cols());
    if m == 0 || n == 0 {
        return Err(OfwError::Shape("empty matrix".into()));
    }
    if g.is_zero() {
        return Err(OfwError::Numeric("power iteration on a zero matrix".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);
    let mut w = vec![0.0; m];
    let mut z = vec![0.0; n];
    let mut prev: Option<f64> = None;
    let mut stop = Extrapolated::default();
    let mut sigma = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters.max(1) {
        iterations += 1;
        g.apply(&v, &mut w);
        sigma = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if sigma == 0.0 {
            // start orthogonal to the row space; restart from a fresh draw
            v.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
            normalize(&mut v);
            continue;
        }
        if let Some(p) = prev {
            if stop.done(sigma - p, sigma, tol) {
                converged = true;
                break;
            }
        }
        prev = Some(sigma);
        g.apply_transpose(&w, &mut z);
        if normalize(&mut z) == 0.0 {
            break;
        }
        v.copy_from_slice(&z);
    }
    if !converged {
        g.apply(&v, &mut w);
        sigma = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if sigma == 0.0 {
            return Err(OfwError::Numeric("power iteration collapsed to zero".into()));
        }
    }
    let u: Vec<f64> = w.iter().map(|x| x / sigma).collect();
    Ok(TopPair { sigma, u, v, iterations, converged })
}
