use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("element radius {radius} exceeds truncation radius {truncation}")]
    RadiusExceedsTruncation { radius: i64, truncation: i64 },

    #[error("empty interior: margin {margin} leaves no basis vectors in a box of radius {radius}")]
    EmptyInterior { margin: i64, radius: i64 },

    #[error("sign mismatch in relation {relation}: measured {measured}, expected {expected}")]
    SignMismatch {
        relation: &'static str,
        measured: String,
        expected: String,
    },

    #[error("relation {relation} fails: deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    RelationFailed {
        relation: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("multiplicity bound m_l <= d_l violated at block {block}: m = {m}, d = {d}")]
    MultiplicityBound { block: usize, m: usize, d: usize },

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
