//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input stream (bad token, missing field, out-of-range id).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally valid input that violates an instance invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Density of the empty set is undefined.
    #[error("density is undefined for the empty vertex set")]
    EmptySet,

    /// A vertex was addressed that is not a member of the current set.
    #[error("vertex {0} is not in the set")]
    NotInSet(u32),

    /// Operation requires every weight table to be convex.
    #[error("edge {edge}: weight function is not convex")]
    NotConvex { edge: usize },

    /// Operation requires every weight table to be concave.
    #[error("edge {edge}: weight function is not concave")]
    NotAllConcave { edge: usize },

    /// The instance has no vertices.
    #[error("hypergraph has no vertices")]
    EmptyGraph,

    #[error("invalid epsilon: {0}")]
    InvalidEpsilon(String),

    /// Every edge has zero top weight, so the geometric search has no
    /// positive lower bound to start from.
    #[error("all edge weights are zero")]
    ZeroWeights,

    /// Brute-force enumeration refuses instances past the hard cap.
    #[error("instance too large for exhaustive enumeration: n = {n} exceeds {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Sweep rounding needs at least one positive coordinate.
    #[error("all vertex coordinates are zero")]
    AllZeroX,

    /// Full constraint enumeration would exceed the export size limit.
    #[error("LP export in full mode needs {constraints} permutation constraints (limit {limit})")]
    LpTooLarge { constraints: u128, limit: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
