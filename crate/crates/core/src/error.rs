use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state {index} is not a unit vector (norm {norm:.12})")]
    InvalidState { index: usize, norm: f64 },

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("at least {required} states are required, got {got}")]
    TooFewStates { required: usize, got: usize },

    #[error("this rule needs exactly {expected} states, got {got}")]
    WrongCardinality { expected: usize, got: usize },

    #[error("gamma must lie in [0, 1), got {0}")]
    InvalidGamma(f64),

    #[error("gamma must be nonnegative, got {0}")]
    NegativeGamma(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("overlap {0} is not below 1; copy bounds are undefined")]
    DegenerateOverlap(f64),

    #[error("copy count must be at least 1")]
    InvalidCopies,

    #[error("POVM has {povm} elements but the set has {states} states")]
    CountMismatch { povm: usize, states: usize },

    #[error("decomposition does not verify: {0}")]
    InfeasibleDecomposition(String),

    #[error("linear program became numerically unstable: {0}")]
    LpNumerical(String),

    #[error("unknown criterion '{0}'")]
    UnknownCriterion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
