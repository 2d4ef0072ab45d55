use thiserror::Error;

/// Errors raised by the phase engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("time {t} s outside the interferometer window [0, {end}] s")]
    TimeOutOfRange { t: f64, end: f64 },

    #[error("coordinate {z} m outside the tabulated domain [{lo}, {hi}] m")]
    OutsideDomain { z: f64, lo: f64, hi: f64 },

    #[error("{what} did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    NoConvergence {
        what: &'static str,
        achieved: f64,
        requested: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular linear system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
