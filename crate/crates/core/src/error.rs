use thiserror::Error;

/// Errors raised by graph construction, cost models, decompositions and the solver.
///
/// Vertex ids in messages are 1-based, matching the file formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("loop edge at vertex {0}")]
    Loop(usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("dimension mismatch: graph has {graph} vertices, cost model has {model}")]
    DimensionMismatch { graph: usize, model: usize },
    #[error("cost table for vertex {vertex} has length {len}, expected {n}")]
    TableLength { vertex: usize, len: usize, n: usize },
    #[error("cost magnitude {max_abs} times {n} vertices exceeds the 2^62 bound")]
    CostBound { max_abs: u64, n: usize },
    #[error("empty degree set for vertex {0}")]
    EmptyDegreeSet(usize),
    #[error("degree {value} for vertex {vertex} outside 0..={max}")]
    DegreeOutOfRange { vertex: usize, value: usize, max: usize },
    #[error("interval for vertex {vertex} has lower bound {lower} above upper bound {upper}")]
    EmptyInterval { vertex: usize, lower: usize, upper: usize },
    #[error("cubic gadget needs at least 4 vertices, got {0}")]
    GadgetTooSmall(usize),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid nice decomposition: {0}")]
    InvalidNice(String),
    #[error("decomposition width {width} exceeds limit {limit}")]
    WidthExceeded { width: usize, limit: usize },
    #[error("state space too large at bag of size {bag}: {reason}")]
    StateSpace { bag: usize, reason: &'static str },
    #[error("instance too large for exhaustive search: {edges} edges, limit {limit}")]
    OracleGuard { edges: usize, limit: usize },
    #[error("internal invariant breach: {0}")]
    Internal(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameters: {0}")]
    Params(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
