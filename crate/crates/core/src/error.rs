use thiserror::Error;

/// Errors produced by the hypergraph clustering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node {0} appears more than once in an edge")]
    DuplicateNode(u32),
    #[error("node id {id} out of range for {n} nodes")]
    NodeOutOfRange { id: u64, n: usize },
    #[error("edge has {got} nodes, expected {expected}")]
    BadEdgeSize { got: usize, expected: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("weight {0} is outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("edge enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("eigensolver did not converge after {matvecs} products (residual {residual:e})")]
    EigenNoConvergence { matvecs: usize, residual: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("observed weight {0} is not binary")]
    InvalidWeights(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
