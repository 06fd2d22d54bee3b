use thiserror::Error;

use crate::spaces::AxiomViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: usize },

    #[error("domain error: entry {index} is {value}, expected a finite nonnegative number")]
    Domain { index: usize, value: f64 },

    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("enumeration of {required} items exceeds the cap of {cap}")]
    CapExceeded { cap: usize, required: usize },

    #[error("axiom violations: {}", display_violations(.0))]
    Axiom(Vec<AxiomViolation>),

    #[error("aggregated distance is not a quasi-pseudometric: {}", display_violations(.violations))]
    Aggregation { violations: Vec<AxiomViolation> },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("point lists differ")]
    PointMismatch,

    #[error("unknown point {0:?}")]
    UnknownPoint(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

fn display_violations(v: &[AxiomViolation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
