use thiserror::Error;

/// Errors raised by the analytic primitives, domains, discs and estimator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {re}+{im}i is not in the open unit disc")]
    OutsideUnitDisc { re: f64, im: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point is not in the domain")]
    OutsideDomain,

    #[error("repeated nodes: {0}")]
    RepeatedNodes(String),

    #[error("pole set must be non-empty")]
    EmptyPoleSet,

    #[error("invalid weight {0}: weights must be strictly positive and finite")]
    InvalidWeight(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
