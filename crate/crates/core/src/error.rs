use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The physical model is inconsistent (e.g. a non-positive potential).
    #[error("model error: {0}")]
    Model(String),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps \
         (off-diagonal norm {off_norm:.3e}, target {target:.3e})"
    )]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        target: f64,
    },

    /// A numerical check on a computed result failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("spectral maximum lies on the grid boundary (bin {0})")]
    Boundary(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
}
