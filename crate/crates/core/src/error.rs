use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation at dim {dim} leaks weight {leak:e} (tolerance {tol:e})")]
    Truncation { dim: usize, leak: f64, tol: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("covariance matrix is not physical: {0}")]
    NonPhysicalCovariance(String),

    #[error("coherent basis is degenerate at theta = {theta} (pi/4 - theta < 1e-6)")]
    DegenerateBasis { theta: f64 },

    #[error("state is not physical: {0}")]
    NonPhysical(String),

    #[error("optimization did not converge: {0}")]
    Convergence(String),

    #[error("pure-state formula applied to a mixed state (det cov = {det})")]
    MixedStateUnsupported { det: f64 },

    #[error("grid does not cover the state: {0}")]
    GridTooSmall(String),

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
