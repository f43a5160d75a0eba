use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Exact-arithmetic size limits exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// `I(r) = 0`: the frequency is undefined on this sphere.
    #[error("nodal sphere at r = {radius}")]
    NodalSphere { radius: f64 },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("quadrature underflow: {0}")]
    Underflow(String),
    #[error("trajectory reached h <= 0 at r = {radius}")]
    TrajectoryCollapse { radius: f64 },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("internal error: {0}")]
    Internal(String),
}
