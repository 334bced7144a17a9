use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("quadrature did not converge for element ({}, {}): error estimate {error:e}", index.0, index.1)]
    Quadrature { index: (usize, usize), error: f64 },

    #[error("overlap matrix is ill-conditioned (cond = {cond:e}) at N = {n_basis}; use a smaller basis")]
    Conditioning { cond: f64, n_basis: usize },

    #[error("wavefunction has a node on the integration path near theta = {location}")]
    NodeOnPath { location: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
