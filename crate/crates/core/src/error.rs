use thiserror::Error;

use crate::distance::lp::LpStatus;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("box is signalling (violation {violation:e})")]
    Signalling { violation: f64 },

    #[error("box is not symmetric (violation {violation:e})")]
    Asymmetric { violation: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("linear program ended with status {0:?}")]
    Lp(LpStatus),

    #[error(
        "constraint generation did not converge after {iterations} rounds \
         (primal value {primal}, max violation {violation:e})"
    )]
    NoConvergence {
        iterations: usize,
        primal: f64,
        violation: f64,
    },

    #[error("eigensolver did not converge within {0} sweeps")]
    Eigen(usize),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
