use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of {function} at u = {u}")]
    Pole { function: String, u: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigencondition does not change sign in [{lo}, {hi}] (nu = {nu}, n = {n})")]
    BracketFailure { nu: f64, n: usize, lo: f64, hi: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("inconsistent result: {0}")]
    Inconsistency(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("series diverges: {0}")]
    SeriesDivergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
