use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian within tolerance (max asymmetry {max_asymmetry:.3e})")]
    NonHermitianInput { max_asymmetry: f64 },

    #[error("matrix dimension must be positive")]
    DimensionZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested rank {rank} outside valid range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("state vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("mixture weights invalid: {0}")]
    WeightSumInvalid(String),

    #[error(
        "matrix is not an isometry (max deviation of V\u{2020}V from identity: {deviation:.3e})"
    )]
    NotIsometry { deviation: f64 },

    #[error("ensemble size {k} is smaller than the state rank {rank}")]
    KTooSmall { k: usize, rank: usize },

    #[error(
        "marginal spectrum too ill-conditioned to filter (min/max eigenvalue ratio {ratio:.3e})"
    )]
    SingularScaling { ratio: f64 },

    #[error("operation requires a 2\u{d7}2 bipartite state, got {da}\u{d7}{db}")]
    DimensionNotTwoByTwo { da: usize, db: usize },

    #[error("R\u{e9}nyi order must be nonnegative, got {0}")]
    NegativeAlpha(f64),

    #[error("state is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
