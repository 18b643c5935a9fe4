use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A point lies outside the chart where derivatives are defined.
    #[error("outside chart domain: {0}")]
    Domain(String),

    /// The surface left the regime where a quantity is defined
    /// (radial graph collapsed, non-positive curvature integral, ...).
    #[error("geometry: {0}")]
    Geometry(String),

    #[error("{what} did not converge after {iterations} iterations (best value {best_value:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        best_value: f64,
        best_point: Vec<f64>,
    },

    #[error("accuracy: {0}")]
    Accuracy(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn geometry<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Geometry(msg.into()))
}
