use thiserror::Error;

/// Errors and negative answers produced by the library.
///
/// Node indices carried by the variants are zero-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("numeric mode mismatch: tolerance {left} vs {right}")]
    ModeMismatch { left: f64, right: f64 },

    #[error("invalid entry at ({row}, {col}): entries must be finite and nonnegative")]
    InvalidEntry { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Kleene star diverges: cycle {cycle:?} has weight greater than 1")]
    Divergent { cycle: Vec<usize> },

    #[error("undefined division at ({row}, {col}): positive entry over zero")]
    UndefinedDivision { row: usize, col: usize },

    #[error("column {column} of the left operand is zero; the residual is unbounded")]
    NoConstraint { column: usize },

    #[error("exact conversion unavailable: {0}")]
    PrecisionLoss(String),

    #[error("exact arithmetic unavailable: {0}")]
    ExactnessUnavailable(String),

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("matrix digraph is acyclic")]
    AcyclicMatrix,

    #[error("no scaling exists: {reason} (witness cycle {cycle:?})")]
    NoScaling { cycle: Vec<usize>, reason: String },

    #[error("vector is not an FP scaling of the matrix")]
    NotAnFpScaling,

    #[error("vector is not strictly positive")]
    NotPositive,

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("pattern violation in triple {triple} at ({row}, {col}): {detail}")]
    PatternViolation {
        triple: usize,
        row: usize,
        col: usize,
        detail: String,
    },

    #[error("cyclic product condition fails on cycle {cycle:?}")]
    HadamardFails { cycle: Vec<usize> },

    #[error("size {n} exceeds the limit {limit}")]
    SizeLimit { n: usize, limit: usize },

    #[error("iteration budget of {budget} exhausted")]
    IterationBudget { budget: usize },

    #[error("matrix is not normalized: maximum cycle geometric mean differs from 1")]
    NotNormalized,

    #[error("node {node} does not lie on any cycle")]
    NodeNotOnCycle { node: usize },

    #[error("certification failed: {0}")]
    CertificationFailure(String),

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("matrices do not commute")]
    NotCommuting,

    #[error("node {node} of graph {graph} has out-degree zero")]
    OutDegreeZero { graph: usize, node: usize },

    #[error("no witness found: {0}")]
    WitnessNotFound(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
