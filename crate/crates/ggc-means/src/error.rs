use thiserror::Error;

/// Errors produced by the numerical engines and law constructors.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument is outside the documented domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature did not reach the requested tolerance within the
    /// subdivision budget.
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    /// The integral is infinite; the associated mean functional does not exist.
    #[error("integral diverges: {0}")]
    Divergent(String),

    /// The operation needs a density and the distribution carries none
    /// (numerical differentiation of the CDF is opt-in via `QuadConfig`).
    #[error("no usable density: {0}")]
    MissingDensity(String),

    /// The inversion formulas require theta * (largest jump of F) < 1.
    #[error("jump of size {jump} violates theta*jump < 1 at theta = {theta}")]
    JumpTooLarge { theta: f64, jump: f64 },

    /// A quantity that must be a probability came out of [0, 1] by more than
    /// the accepted tolerance; this signals a formula or input defect upstream.
    #[error("{what} evaluated to {value}, outside [0, 1] beyond tolerance")]
    NotADistribution { what: &'static str, value: f64 },

    /// Catalog lookup with an unrecognized name.
    #[error("unknown entry `{0}`")]
    UnknownEntry(String),

    /// Malformed distribution file or grid expression.
    #[error("parse error: {0}")]
    Parse(String),

    /// I/O failure, with the offending path in the message.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
