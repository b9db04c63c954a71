//! Sparse iterates: points of the decision set stored as explicit convex
//! combinations of boundary points.
//!
//! Matrix-valued atoms are kept in factored rank-one form. Densification
//! exists for tests and debugging only; the online engine never calls it on
//! matrix domains.

use std::sync::Arc;

use crate::error::{OfwError, Result};

/// Weights below this value are pruned after a mixing step.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

const UNIT_NORM_TOL: f64 = 1e-9;
const WEIGHT_SUM_TOL: f64 = 1e-9;

/// `scale * left * right^T`, with unit-norm factors.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOne {
    scale: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl RankOne {
    pub fn new(scale: f64, left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        for (name, f) in [("left", &left), ("right", &right)] {
            let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(OfwError::Parameter(format!(
                    "rank-one {name} factor has norm {norm}, expected 1"
                )));
            }
        }
        if !scale.is_finite() {
            return Err(OfwError::Numeric("rank-one scale is not finite".into()));
        }
        Ok(Self { scale, left, right })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn rows(&self) -> usize {
        self.left.len()
    }

    pub fn cols(&self) -> usize {
        self.right.len()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.scale * self.left[i] * self.right[j]
    }
}

/// Ambient shape of an atom or iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Vector(usize),
    Matrix(usize, usize),
}

impl Shape {
    /// Length of the flattened (row-major) coordinate vector.
    pub fn len(&self) -> usize {
        match *self {
            Shape::Vector(n) => n,
            Shape::Matrix(m, n) => m * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A boundary point of a decision set.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryAtom {
    Dense(Vec<f64>),
    RankOne(RankOne),
}

impl BoundaryAtom {
    pub fn shape(&self) -> Shape {
        match self {
            BoundaryAtom::Dense(v) => Shape::Vector(v.len()),
            BoundaryAtom::RankOne(r) => Shape::Matrix(r.rows(), r.cols()),
        }
    }

    /// Row-major flattening of the atom.
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            BoundaryAtom::Dense(v) => v.clone(),
            BoundaryAtom::RankOne(r) => {
                let mut out = Vec::with_capacity(r.rows() * r.cols());
                for &li in &r.left {
                    out.extend(r.right.iter().map(|&rj| r.scale * li * rj));
                }
                out
            }
        }
    }

    /// Adds `w * atom` into a flattened accumulator.
    pub fn add_scaled_into(&self, w: f64, acc: &mut [f64]) {
        match self {
            BoundaryAtom::Dense(v) => {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += w * x;
                }
            }
            BoundaryAtom::RankOne(r) => {
                let n = r.cols();
                for (i, &li) in r.left.iter().enumerate() {
                    let c = w * r.scale * li;
                    for (a, &rj) in acc[i * n..(i + 1) * n].iter_mut().zip(&r.right) {
                        *a += c * rj;
                    }
                }
            }
        }
    }

    /// Inner product with a flattened vector of the same shape.
    pub fn dot(&self, c: &[f64]) -> f64 {
        match self {
            BoundaryAtom::Dense(v) => v.iter().zip(c).map(|(a, b)| a * b).sum(),
            BoundaryAtom::RankOne(r) => {
                let n = r.cols();
                r.left
                    .iter()
                    .enumerate()
                    .map(|(i, &li)| {
                        li * c[i * n..(i + 1) * n]
                            .iter()
                            .zip(&r.right)
                            .map(|(a, b)| a * b)
                            .sum::<f64>()
                    })
                    .sum::<f64>()
                    * r.scale
            }
        }
    }
}

/// The decision point as a convex combination of boundary atoms.
///
/// `round` is the index `t` of the round at which this point is played. A
/// round-`t` iterate never carries more than `t` atoms.
#[derive(Debug, Clone)]
pub struct SparseIterate {
    atoms: Vec<Arc<BoundaryAtom>>,
    weights: Vec<f64>,
    round: usize,
    shape: Shape,
}

impl SparseIterate {
    /// The round-1 iterate consisting of a single atom.
    pub fn single(atom: BoundaryAtom) -> Self {
        let shape = atom.shape();
        Self {
            atoms: vec![Arc::new(atom)],
            weights: vec![1.0],
            round: 1,
            shape,
        }
    }

    pub fn new(atoms: Vec<BoundaryAtom>, weights: Vec<f64>, round: usize) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(OfwError::Parameter(format!(
                "{} atoms with {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if round == 0 || atoms.len() > round {
            return Err(OfwError::Parameter(format!(
                "round {round} cannot hold {} atoms",
                atoms.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(OfwError::Parameter("negative or NaN weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(OfwError::Parameter(format!("weights sum to {sum}")));
        }
        let shape = atoms[0].shape();
        if atoms.iter().any(|a| a.shape() != shape) {
            return Err(OfwError::Shape("atoms of mixed shape".into()));
        }
        Ok(Self {
            atoms: atoms.into_iter().map(Arc::new).collect(),
            weights,
            round,
            shape,
        })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl ExactSizeIterator<Item = &BoundaryAtom> {
        self.atoms.iter().map(|a| a.as_ref())
    }

    pub fn atom(&self, k: usize) -> &BoundaryAtom {
        &self.atoms[k]
    }

    /// Returns `(1 - alpha) * self + alpha * v` as the next round's iterate.
    pub fn mix(&self, v: BoundaryAtom, alpha: f64) -> Result<Self> {
        let mut next = self.clone();
        next.mix_in_place(v, alpha)?;
        Ok(next)
    }

    /// In-place variant of [`SparseIterate::mix`].
    pub fn mix_in_place(&mut self, v: BoundaryAtom, alpha: f64) -> Result<()> {
        self.mix_shared(Arc::new(v), alpha)
    }

    /// In-place mix with an atom that may also be held elsewhere.
    pub fn mix_shared(&mut self, v: Arc<BoundaryAtom>, alpha: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(OfwError::Parameter(format!("mixing weight {alpha} outside [0, 1]")));
        }
        if v.shape() != self.shape {
            return Err(OfwError::Shape(format!(
                "atom shape {:?} does not match iterate shape {:?}",
                v.shape(),
                self.shape
            )));
        }
        let keep = 1.0 - alpha;
        let mut pruned = false;
        let mut k = 0;
        while k < self.weights.len() {
            let w = self.weights[k] * keep;
            if w < PRUNE_THRESHOLD {
                self.weights.remove(k);
                self.atoms.remove(k);
                pruned = true;
            } else {
                self.weights[k] = w;
                k += 1;
            }
        }
        if alpha >= PRUNE_THRESHOLD || self.weights.is_empty() {
            self.atoms.push(v);
            self.weights.push(alpha.max(PRUNE_THRESHOLD));
        }
        if pruned {
            let sum: f64 = self.weights.iter().sum();
            self.weights.iter_mut().for_each(|w| *w /= sum);
        }
        self.round += 1;
        Ok(())
    }

    /// `sum_k w_k * atom_k`, flattened row-major for matrix atoms.
    pub fn densify(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.len()];
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            a.add_scaled_into(w, &mut out);
        }
        out
    }

    /// Entry `(i, j)` (0-based) of a matrix iterate, without densifying.
    pub fn entry(&self, i: usize, j: usize) -> Result<f64> {
        let (m, n) = match self.shape {
            Shape::Matrix(m, n) => (m, n),
            Shape::Vector(_) => {
                return Err(OfwError::UnsupportedDomain(
                    "entry access needs rank-one matrix atoms".into(),
                ))
            }
        };
        if i >= m || j >= n {
            return Err(OfwError::Parameter(format!(
                "entry ({i}, {j}) outside a {m}x{n} matrix"
            )));
        }
        let mut acc = 0.0;
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            match a.as_ref() {
                BoundaryAtom::RankOne(r) => acc += w * r.entry(i, j),
                BoundaryAtom::Dense(_) => {
                    return Err(OfwError::UnsupportedDomain(
                        "entry access on dense atoms".into(),
                    ))
                }
            }
        }
        Ok(acc)
    }

    /// Linear functional `c · x` evaluated atom by atom.
    pub fn dot(&self, c: &[f64]) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, &w)| w * a.dot(c))
            .sum()
    }
}
