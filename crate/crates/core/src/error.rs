use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel truncation infeasible: tail bound {bound:e} > tolerance {tol:e} at j_max cap {cap}")]
    TruncationInfeasible { bound: f64, tol: f64, cap: usize },

    #[error("arc too small: covers {nodes} grid nodes, at least {required} required")]
    ArcTooSmall { nodes: usize, required: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("function vanishes on the boundary (min |f| = {min_modulus:e})")]
    ZeroOnBoundary { min_modulus: f64 },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis not satisfied: log-norm {log_norm} is not below threshold exponent {threshold}")]
    HypothesisNotSatisfied { log_norm: f64, threshold: f64 },

    #[error("singular linear system (smallest pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("inadmissible coefficient: {0}")]
    Inadmissible(String),

    #[error("trace vanishes on the inner circle (min |u| = {min_modulus:e})")]
    VanishingTrace { min_modulus: f64 },

    #[error("empty table")]
    EmptyTable,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
