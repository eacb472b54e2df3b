use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation `{op}` is not idempotent: f({point}, ..., {point}) = {value}")]
    NonIdempotent { op: String, point: usize, value: usize },

    #[error("malformed table for operation `{op}`: {reason}")]
    MalformedTable { op: String, reason: String },

    #[error("malformed algebra: {0}")]
    MalformedAlgebra(String),

    #[error("partition is not a congruence: operation `{op}` maps related tuples {left:?} ~ {right:?} to unrelated values")]
    NotACongruence { op: String, left: Vec<usize>, right: Vec<usize> },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("cap exceeded: {what} grew beyond {cap}")]
    CapExceeded { what: String, cap: usize },

    #[error("relation is not subdirect in coordinate {0}")]
    NotSubdirect(usize),

    #[error("term clone truncated at {cap} operations; quantified check is undecided")]
    CloneTruncated { cap: usize },

    #[error("no operation found within cap: {0}")]
    NotFoundWithinCap(String),

    #[error("exhausted search without a witness: {0}")]
    SearchExhausted(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("filter starvation: accepted {accepted} of {tried} draws")]
    FilterStarvation { accepted: usize, tried: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
