use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A frequency outside the alias-free band `|ξ| ≤ π/(4h)`.
    #[error("frequency {xi} outside the alias-free band |xi| <= {limit}")]
    Range { xi: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// `λ` is numerically inside the spectrum.
    #[error("near-singular resolvent at lambda = {re}{im:+}i (sigma_min = {sigma_min:e})")]
    NearSingular { re: f64, im: f64, sigma_min: f64 },

    #[error("contour contract violated: {0}")]
    Contract(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
