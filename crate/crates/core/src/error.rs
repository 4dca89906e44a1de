use thiserror::Error;

/// Errors raised by protolab operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty base matrix")]
    EmptyMatrix,
    #[error("line {line}: expected {expected} entries, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid entry `{token}` (expected a non-negative integer)")]
    BadEntry { line: usize, token: String },
    #[error("row {0} of the base matrix is all zero")]
    ZeroRow(usize),
    #[error("column {0} of the base matrix is all zero")]
    ZeroColumn(usize),
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown built-in protograph `{0}`")]
    UnknownProtograph(String),

    #[error("{0} is not a prime >= 5")]
    BadPrime(u64),
    #[error("graph is not regular: vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    #[error("graph is not simple: parallel edge between {0} and {1}")]
    NotSimple(usize, usize),
    #[error("target degree {target} does not divide degree {degree}")]
    DegreeNotDivisible { degree: usize, target: usize },
    #[error("graph degree {graph} does not match protograph edge count {edges}")]
    DegreeMismatch { graph: usize, edges: usize },
    #[error("edge coloring required but missing")]
    MissingColoring,
    #[error("improper edge coloring at vertex {vertex}: color {color} repeated or missing")]
    ImproperColoring { vertex: usize, color: usize },
    #[error("permutation for edge type {edge} is not a permutation of 0..{size}")]
    BadPermutation { edge: usize, size: usize },
    #[error("parallel lifted edge: types {first} and {second} collide in copy {copy}")]
    ParallelLiftedEdge {
        first: usize,
        second: usize,
        copy: usize,
    },

    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("insufficient tail data: {found} usable iterations, need {needed}")]
    InsufficientTail { found: usize, needed: usize },
    #[error("noise standard deviation must be positive, got {0}")]
    BadSigma(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
