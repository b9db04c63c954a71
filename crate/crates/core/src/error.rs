use std::io;

use thiserror::Error;

/// Errors raised by oracles, the online engines and the benchmark harness.
#[derive(Debug, Error)]
pub enum OfwError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operation not supported on this domain: {0}")]
    UnsupportedDomain(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("infeasible domain: {0}")]
    Infeasible(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = OfwError> = std::result::Result<T, E>;

pub(crate) fn check_finite(xs: &[f64], what: &str) -> Result<()> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(OfwError::Numeric(format!("NaN coordinate in {what}")));
    }
    Ok(())
}
