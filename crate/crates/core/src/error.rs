use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid mode index n = {n}: operator is defined on non-constant modes only")]
    InvalidMode { n: i64 },
    #[error("empty spectrum: cutoff {cutoff} lies below the ground state")]
    EmptySpectrum { cutoff: f64 },
    #[error("inconsistent regularization: numeric zeta(0) = {numeric}, expected {expected} (error estimate {err_estimate})")]
    InconsistentRegularization {
        numeric: f64,
        expected: f64,
        err_estimate: f64,
    },
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("tail not certifiable below {target:e} with {modes} modes; increase the cutoff")]
    IncreaseCutoff { modes: usize, target: f64 },
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {x}")))
    }
}

pub(crate) fn ensure_positive(name: &str, x: f64) -> Result<()> {
    ensure_finite(name, x)?;
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}
