use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("cannot build a point from the zero vector")]
    ZeroVector,

    #[error("a design needs at least one point")]
    EmptyDesign,

    #[error("unknown design name `{0}`")]
    UnknownName(String),

    #[error("invalid product design: {0}")]
    InvalidProductSpec(String),

    #[error("polar node solve did not converge for d={d}, n_theta={n_theta} (best residual {residual:e})")]
    NoConvergence { d: usize, n_theta: usize, residual: f64 },

    #[error("information matrix is singular for d={d} with n={n} points")]
    Singular { d: usize, n: usize },

    #[error("{n} points cannot form a spherical {t}-design (lower bound {bound})")]
    BelowLowerBound { t: usize, n: usize, bound: usize },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("line {line}, column {column}: cannot parse `{token}` as a number")]
    Parse { line: usize, column: usize, token: String },

    #[error("point {index}: norm {norm} is not within 1e-6 of 1")]
    OffSphere { index: usize, norm: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
