use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument `{what}` out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("newton system is numerically singular")]
    SingularHessian,

    #[error("quadrature tolerance not met: estimate {estimate}, error {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },

    #[error("integral diverged (truncated estimates {estimates:?})")]
    Diverged { estimates: Vec<f64> },

    #[error("weight scheme is ill-defined: {0}")]
    IllDefinedScheme(String),

    #[error("at least {needed} data points required, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("mode of the log optimal density not found after {iterations} iterations (|grad|_inf = {grad_norm:e})")]
    ModeNotFound { iterations: usize, grad_norm: f64 },

    #[error("integrand overflow: log value {log_value} at shift {shift}, point {point}")]
    Overflow {
        log_value: f64,
        shift: usize,
        point: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),
}
