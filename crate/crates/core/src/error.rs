use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point field is empty")]
    EmptyField,
    #[error("hop sequence is empty")]
    EmptySequence,
    #[error("hop {hop} has average SNR {snr:.4e} below 1 under the high-SNR allocation")]
    RegimeViolation { hop: usize, snr: f64 },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("no root bracketed in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("quadrature did not reach tolerance: estimate {estimate:.6e}, error {error:.3e}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("no route: {0}")]
    NoRoute(String),
    #[error("distance table has not been built")]
    CacheMissing,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(domain(msg))
    }
}
