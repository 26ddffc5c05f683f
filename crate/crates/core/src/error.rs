use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution or model parameter lies outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The generator needs an absolute moment the error family does not have.
    #[error("{family} has no finite absolute moment of order {order}, as required by the {generator} generator")]
    MomentNonexistent { family: String, generator: String, order: u32 },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e} (target {target:e})")]
    QuadratureNotConverged { estimate: f64, error_bound: f64, target: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A net or grid would exceed the desk-scale size guard.
    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity { what: String, requested: f64, limit: f64 },

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64, last_iterate: Vec<f64> },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
