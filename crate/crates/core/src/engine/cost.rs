use crate::error::{OfwError, Result};
use crate::iterate::{Shape, SparseIterate};
use crate::oracles::DomainSpec;
use crate::schedule::CostMetadata;

/// One round's cost function.
#[derive(Debug, Clone, PartialEq)]
pub enum CostEvent {
    /// `‖x - target‖²`
    Quadratic { target: Vec<f64> },
    /// `Σ_i |x_i - target_i|`
    Absolute { target: Vec<f64> },
    /// `g · x`
    Linear { g: Vec<f64> },
    /// `(X(i, j) - rating)²`, indices 0-based.
    MatrixEntry { i: usize, j: usize, rating: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostFamily {
    Quadratic,
    Absolute,
    Linear,
    MatrixEntry,
}

impl CostFamily {
    pub fn name(self) -> &'static str {
        match self {
            CostFamily::Quadratic => "quadratic",
            CostFamily::Absolute => "absolute",
            CostFamily::Linear => "linear",
            CostFamily::MatrixEntry => "matrix_entry",
        }
    }

    /// Metadata of the family on `domain`. `payload_bound` bounds the norm of
    /// the targets (quadratic), of `g` (linear) or of the ratings (matrix
    /// entries); it is ignored for the absolute family.
    pub fn metadata(self, domain: &DomainSpec, payload_bound: f64) -> Result<CostMetadata> {
        let dim = domain.dim();
        match self {
            CostFamily::Quadratic => {
                CostMetadata::new(2.0 * (domain.max_norm() + payload_bound), Some(1.0), Some(1.0), dim)
            }
            CostFamily::Absolute => CostMetadata::new((dim as f64).sqrt(), None, None, dim),
            CostFamily::Linear => CostMetadata::new(payload_bound, Some(0.0), Some(0.0), dim),
            CostFamily::MatrixEntry => match domain {
                DomainSpec::TraceNormBall { tau, .. } => {
                    CostMetadata::new(2.0 * (tau + payload_bound), Some(1.0), None, dim)
                }
                _ => Err(OfwError::UnsupportedDomain("matrix-entry costs need a trace-norm ball".into())),
            },
        }
    }
}

impl CostEvent {
    pub fn family(&self) -> CostFamily {
        match self {
            CostEvent::Quadratic { .. } => CostFamily::Quadratic,
            CostEvent::Absolute { .. } => CostFamily::Absolute,
            CostEvent::Linear { .. } => CostFamily::Linear,
            CostEvent::MatrixEntry { .. } => CostFamily::MatrixEntry,
        }
    }

    fn check_len(&self, payload: &[f64], x: &[f64]) -> Result<()> {
        if payload.len() != x.len() {
            return Err(OfwError::Shape(format!(
                "{} cost of dimension {} at a point of dimension {}",
                self.family().name(),
                payload.len(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Value at a flattened point. Matrix entries read `x` row-major with
    /// the given number of columns.
    pub fn value(&self, x: &[f64], cols: usize) -> Result<f64> {
        Ok(match self {
            CostEvent::Quadratic { target } => {
                self.check_len(target, x)?;
                x.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum()
            }
            CostEvent::Absolute { target } => {
                self.check_len(target, x)?;
                x.iter().zip(target).map(|(a, b)| (a - b).abs()).sum()
            }
            CostEvent::Linear { g } => {
                self.check_len(g, x)?;
                x.iter().zip(g).map(|(a, b)| a * b).sum()
            }
            CostEvent::MatrixEntry { i, j, rating } => {
                let k = i * cols + j;
                let v = *x.get(k).filter(|_| *j < cols).ok_or_else(|| {
                    OfwError::Parameter(format!("entry ({i}, {j}) outside the matrix"))
                })?;
                (v - rating) * (v - rating)
            }
        })
    }

    /// Value at a sparse iterate; matrix entries are read without
    /// densifying.
    pub fn value_at(&self, x: &SparseIterate) -> Result<f64> {
        match (self, x.shape()) {
            (CostEvent::MatrixEntry { i, j, rating }, _) => {
                let v = x.entry(*i, *j)?;
                Ok((v - rating) * (v - rating))
            }
            (CostEvent::Linear { g }, _) => {
                if g.len() != x.shape().len() {
                    return Err(OfwError::Shape("linear cost dimension mismatch".into()));
                }
                Ok(x.dot(g))
            }
            (_, Shape::Vector(_)) => self.value(&x.densify(), 0),
            (_, Shape::Matrix(..)) => Err(OfwError::UnsupportedDomain(format!(
                "{} costs on matrix iterates",
                self.family().name()
            ))),
        }
    }

    /// A subgradient at a flattened point; `0` is used at kinks of `|·|`.
    pub fn subgradient(&self, x: &[f64], cols: usize) -> Result<Vec<f64>> {
        Ok(match self {
            CostEvent::Quadratic { target } => {
                self.check_len(target, x)?;
                x.iter().zip(target).map(|(a, b)| 2.0 * (a - b)).collect()
            }
            CostEvent::Absolute { target } => {
                self.check_len(target, x)?;
                x.iter()
                    .zip(target)
                    .map(|(a, b)| {
                        let z = a - b;
                        if z > 0.0 {
                            1.0
                        } else if z < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            CostEvent::Linear { g } => {
                self.check_len(g, x)?;
                g.clone()
            }
            CostEvent::MatrixEntry { i, j, rating } => {
                let k = i * cols + j;
                if *j >= cols || k >= x.len() {
                    return Err(OfwError::Parameter(format!("entry ({i}, {j}) outside the matrix")));
                }
                let mut g = vec![0.0; x.len()];
                g[k] = 2.0 * (x[k] - rating);
                g
            }
        })
    }
}
