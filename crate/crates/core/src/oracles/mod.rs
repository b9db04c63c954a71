//! Linear minimization oracles, and the projections the OGD baseline needs.
//!
//! Every argmin breaks ties toward the lowest index so runs are
//! bit-reproducible.

mod ball;
mod flow;
mod matroid;
mod power;
mod simplex;
mod trace_ball;

pub use ball::{lmo_ball, project_ball};
pub use flow::{lmo_flow_dag, FlowGraph};
pub use matroid::lmo_uniform_matroid;
pub use power::{power_iteration_top_pair, DenseMatrix, MatrixOp, SparseMatrix, TopPair};
pub use simplex::{lmo_simplex, project_simplex, project_simplex_scaled};
pub use trace_ball::{lmo_trace_ball, nuclear_norm, project_trace_ball, singular_values};

use std::fmt;

use crate::error::{OfwError, Result};
use crate::iterate::{BoundaryAtom, Shape};

/// Default relative tolerance of the power iteration.
pub const DEFAULT_POWER_TOL: f64 = 1e-5;
pub const DEFAULT_POWER_MAX_ITERS: usize = 1000;

/// The decision sets supported by the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Simplex { n: usize },
    Ball { n: usize, radius: f64 },
    FlowPolytope(FlowGraph),
    UniformMatroid { n: usize, k: usize },
    TraceNormBall { m: usize, n: usize, tau: f64 },
}

impl DomainSpec {
    pub fn simplex(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(OfwError::Parameter("simplex needs n >= 1".into()));
        }
        Ok(Self::Simplex { n })
    }

    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        if n == 0 || !(radius > 0.0) {
            return Err(OfwError::Parameter(format!("ball needs n >= 1 and radius > 0, got {n}, {radius}")));
        }
        Ok(Self::Ball { n, radius })
    }

    pub fn uniform_matroid(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(OfwError::Parameter(format!("uniform matroid needs 1 <= k <= n, got k={k}, n={n}")));
        }
        Ok(Self::UniformMatroid { n, k })
    }

    pub fn trace_norm_ball(m: usize, n: usize, tau: f64) -> Result<Self> {
        if m == 0 || n == 0 || !(tau > 0.0) {
            return Err(OfwError::Parameter(format!("trace-norm ball needs m, n >= 1 and tau > 0, got {m}x{n}, {tau}")));
        }
        Ok(Self::TraceNormBall { m, n, tau })
    }

    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::Simplex { .. } => "simplex",
            DomainSpec::Ball { .. } => "ball",
            DomainSpec::FlowPolytope(_) => "flow",
            DomainSpec::UniformMatroid { .. } => "matroid",
            DomainSpec::TraceNormBall { .. } => "trace",
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            DomainSpec::Simplex { n } | DomainSpec::Ball { n, .. } | DomainSpec::UniformMatroid { n, .. } => {
                Shape::Vector(*n)
            }
            DomainSpec::FlowPolytope(g) => Shape::Vector(g.edge_count()),
            DomainSpec::TraceNormBall { m, n, .. } => Shape::Matrix(*m, *n),
        }
    }

    /// Ambient dimension of the flattened coordinates.
    pub fn dim(&self) -> usize {
        self.shape().len()
    }

    /// Euclidean (Frobenius) diameter bound.
    pub fn diameter(&self) -> f64 {
        match self {
            DomainSpec::Simplex { .. } => 2f64.sqrt(),
            DomainSpec::Ball { radius, .. } => 2.0 * radius,
            DomainSpec::FlowPolytope(g) => (2.0 * g.longest_path_len() as f64).sqrt(),
            DomainSpec::UniformMatroid { k, .. } => (2.0 * *k as f64).sqrt(),
            DomainSpec::TraceNormBall { tau, .. } => 2.0 * tau,
        }
    }

    /// Largest Euclidean norm of a point of the domain.
    pub fn max_norm(&self) -> f64 {
        match self {
            DomainSpec::Simplex { .. } => 1.0,
            DomainSpec::Ball { radius, .. } => *radius,
            DomainSpec::FlowPolytope(g) => (g.longest_path_len() as f64).sqrt(),
            DomainSpec::UniformMatroid { k, .. } => (*k as f64).sqrt(),
            DomainSpec::TraceNormBall { tau, .. } => *tau,
        }
    }

    /// Linear minimization over the domain.
    pub fn lmo(&self, grad: &Gradient, opts: &LmoOptions) -> Result<LmoOutput> {
        let atom = match self {
            DomainSpec::Simplex { .. } => lmo_simplex(self.dense_gradient(grad)?)?,
            DomainSpec::Ball { radius, .. } => lmo_ball(self.dense_gradient(grad)?, *radius)?,
            DomainSpec::FlowPolytope(g) => lmo_flow_dag(g, self.dense_gradient(grad)?)?,
            DomainSpec::UniformMatroid { n, k } => lmo_uniform_matroid(*n, *k, self.dense_gradient(grad)?)?,
            DomainSpec::TraceNormBall { m, n, tau } => {
                return match grad {
                    Gradient::Dense(c) => {
                        if c.len() != m * n {
                            return Err(OfwError::Shape(format!("gradient of length {} for {m}x{n}", c.len())));
                        }
                        lmo_trace_ball(*tau, &DenseMatrix::new(*m, *n, c.clone())?, opts)
                    }
                    Gradient::SparseMatrix(s) => {
                        if s.rows() != *m || s.cols() != *n {
                            return Err(OfwError::Shape(format!(
                                "{}x{} gradient for {m}x{n}",
                                s.rows(),
                                s.cols()
                            )));
                        }
                        lmo_trace_ball(*tau, s, opts)
                    }
                };
            }
        };
        Ok(LmoOutput { atom, converged: true })
    }

    fn dense_gradient<'g>(&self, grad: &'g Gradient) -> Result<&'g [f64]> {
        match grad {
            Gradient::Dense(c) if c.len() == self.dim() => Ok(c.as_slice()),
            Gradient::Dense(c) => Err(OfwError::Shape(format!(
                "gradient of length {} for a {}-dimensional {}",
                c.len(),
                self.dim(),
                self.name()
            ))),
            Gradient::SparseMatrix(_) => Err(OfwError::UnsupportedDomain(format!(
                "sparse matrix gradient on the {} domain",
                self.name()
            ))),
        }
    }

    /// Euclidean projection, where it is offered.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.dim() {
            return Err(OfwError::Shape(format!("point of length {} for {}", y.len(), self.name())));
        }
        match self {
            DomainSpec::Simplex { .. } => project_simplex(y),
            DomainSpec::Ball { radius, .. } => Ok(project_ball(y, *radius)),
            DomainSpec::TraceNormBall { m, n, tau } => project_trace_ball(y, *m, *n, *tau),
            DomainSpec::FlowPolytope(_) | DomainSpec::UniformMatroid { .. } => Err(OfwError::UnsupportedDomain(
                format!("no projection oracle for the {} domain", self.name()),
            )),
        }
    }

    /// Membership test with absolute slack `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(OfwError::Shape(format!("point of length {} for {}", x.len(), self.name())));
        }
        Ok(match self {
            DomainSpec::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
            DomainSpec::Ball { radius, .. } => norm(x) <= radius + tol,
            DomainSpec::UniformMatroid { k, .. } => {
                x.iter().all(|&v| (-tol..=1.0 + tol).contains(&v)) && x.iter().sum::<f64>() <= *k as f64 + tol
            }
            DomainSpec::FlowPolytope(g) => g.is_unit_flow(x, tol),
            DomainSpec::TraceNormBall { m, n, tau } => nuclear_norm(x, *m, *n)? <= tau + tol,
        })
    }

    /// The initial point: the oracle applied to the all-ones direction.
    pub fn initial_atom(&self, opts: &LmoOptions) -> Result<BoundaryAtom> {
        Ok(self.lmo(&Gradient::Dense(vec![1.0; self.dim()]), opts)?.atom)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Simplex { n } => write!(f, "Simplex(n={n})"),
            DomainSpec::Ball { n, radius } => write!(f, "Ball(n={n}, r={radius})"),
            DomainSpec::FlowPolytope(g) => {
                write!(f, "Flow(nodes={}, edges={}, s={}, t={})", g.node_count(), g.edge_count(), g.source(), g.sink())
            }
            DomainSpec::UniformMatroid { n, k } => write!(f, "UniformMatroid(n={n}, k={k})"),
            DomainSpec::TraceNormBall { m, n, tau } => write!(f, "TraceNormBall({m}x{n}, tau={tau})"),
        }
    }
}

/// A gradient handed to an oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Gradient {
    /// Flattened coordinates (row-major for matrices).
    Dense(Vec<f64>),
    SparseMatrix(SparseMatrix),
}

impl Gradient {
    pub fn to_dense(&self) -> Vec<f64> {
        match self {
            Gradient::Dense(v) => v.clone(),
            Gradient::SparseMatrix(s) => s.to_dense(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmoOptions {
    pub power_tol: f64,
    pub power_max_iters: usize,
    pub seed: u64,
}

impl Default for LmoOptions {
    fn default() -> Self {
        Self { power_tol: DEFAULT_POWER_TOL, power_max_iters: DEFAULT_POWER_MAX_ITERS, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmoOutput {
    pub atom: BoundaryAtom,
    /// False when a power iteration hit its iteration cap.
    pub converged: bool,
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn argmin_lowest(c: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in c.iter().enumerate().skip(1) {
        if v < c[best] {
            best = i;
        }
    }
    best
}
