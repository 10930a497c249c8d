use thiserror::Error;

/// Owner of a local block in an approximate inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockOwner {
    /// Block of edges incident to a vertex (edge models).
    Vertex(usize),
    /// Block of the two endpoints of an edge (vertex models).
    Edge(usize),
}

impl std::fmt::Display for BlockOwner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockOwner::Vertex(v) => write!(f, "vertex {v}"),
            BlockOwner::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not a forest")]
    NotAForest,
    #[error("graph is disconnected between {0} and {1}")]
    Disconnected(usize, usize),
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("pinning leaves no admissible configuration")]
    EmptySupport,
    #[error("conditioning on element {element} with probability zero")]
    ZeroProbabilityCondition { element: usize },
    #[error("element {element} is deterministic under the pinning")]
    DegenerateElement { element: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("local block of {owner} is singular")]
    SingularBlock { owner: BlockOwner },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("recursion denominator vanished")]
    DenominatorZero,
    #[error("chain is not reversible (residual {0:e})")]
    NotReversible(f64),
    #[error("degenerate quadratic form: {0}")]
    Degenerate(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
