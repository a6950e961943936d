//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("derivative order exceeds degree (order {order}, degree {degree})")]
    DerivativeOrder { order: usize, degree: usize },

    #[error(
        "derivative orders k1+k2={sum} exceed {max} for inner products of degree-{degree} splines"
    )]
    InnerProductOrder {
        sum: usize,
        max: usize,
        degree: usize,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid band: {0}")]
    InvalidBand(String),

    #[error("unsupported degree p={0} (verified range is 2..=8)")]
    UnsupportedDegree(usize),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("root multiplicity {0} unsupported (only simple and double roots)")]
    UnsupportedMultiplicity(usize),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular matrix: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
