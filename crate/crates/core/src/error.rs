use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("susceptibility pole at omega = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("non-evanescent branch: k^2 - W = {re} + {im}i lies on the cut (-inf, 0]")]
    NonEvanescent { re: f64, im: f64 },
    #[error("degenerate factor in {0}")]
    DegenerateFactor(&'static str),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("newton did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("solution rejected: {0}")]
    Rejected(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
