use alloc::string::String;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry count {found} does not match shape {rows}x{cols}")]
    BadLength { rows: usize, cols: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace invariant violated: trace is {trace}")]
    InvalidTrace { trace: f64 },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("coordinates lie outside the state body: minimum eigenvalue {min_eigenvalue:e}")]
    OutsideStateBody { min_eigenvalue: f64 },

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("representations belong to different group variants")]
    MismatchedGroups,

    #[error("block diagonalisation failed: unresolved cluster with eigenvalue gap {gap:e}")]
    BlockDiagonalization { gap: f64 },

    #[error("unknown mode label {0}")]
    UnknownLabel(i64),

    #[error("SDP constraints are linearly dependent")]
    DependentConstraints,

    #[error("SDP solver made no progress after {iterations} iterations")]
    NumericalFailure { iterations: usize },

    #[error("channel is not covariant (deviation {deviation:e})")]
    NotCovariant { deviation: f64 },

    #[error("epsilon-net refused: cardinality bound {bound:e} exceeds the budget of {budget} states")]
    NetTooLarge { bound: f64, budget: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("q = {q} does not exceed q* = {q_star}")]
    QBelowThreshold { q: f64, q_star: f64 },

    #[error("mode leaks outside the support of the twirled state (weight {leak:e})")]
    SupportLeak { leak: f64 },

    #[error("twirled state has empty support")]
    EmptySupport,

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
