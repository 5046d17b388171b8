use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {n} exceeds the configured guard {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("dimension {n} is below the minimum {min} required here")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("function undefined on eigenvalue {0}")]
    FunctionUndefinedOnSpectrum(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eig:e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("matrix is singular (smallest |eigenvalue| {min_abs_eig:e})")]
    SingularMatrix { min_abs_eig: f64 },
    #[error("rank {rank} is invalid for dimension {n}")]
    BadRank { rank: usize, n: usize },
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("inputs are equal within tolerance")]
    EqualInputs,
    #[error("not an effect: spectrum [{min_eig}, {max_eig}] leaves [0, 1]")]
    NotAnEffect { min_eig: f64, max_eig: f64 },
    #[error("not a projection (idempotency defect {defect:e})")]
    NotAProjection { defect: f64 },
    #[error("not a rank-one projection")]
    NotRankOneProjection,
    #[error("projection is trivial (0 or I)")]
    TrivialProjection,
    #[error("inputs do not commute (commutator norm {norm:e})")]
    NonCommutingInput { norm: f64 },
    #[error("eigenvalue gap {gap:e} is below the cluster width but above noise level")]
    NonSeparableSpectrum { gap: f64 },
    #[error("sample does not contain the tomography family: missing {0}")]
    IncompleteSample(String),
    #[error("sample is not a frame function of a state (residual {residual:e})")]
    InconsistentSample { residual: f64 },
    #[error("oracle is not in the declared class at stage `{stage}` (residual {residual:e})")]
    OracleNotInClass { stage: String, residual: f64 },
    #[error("input outside the map's domain: {0}")]
    DomainViolation(String),
    #[error("input outside the interval [E, F]")]
    OutOfInterval,
    #[error("T must be an invertible effect")]
    NotInvertibleEffect,
    #[error("unknown contract `{0}`")]
    ContractUnknown(String),
    #[error("descriptor is incompatible with contract: {0}")]
    IncompatibleContract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn not_in_class(stage: impl Into<String>, residual: f64) -> Self {
        Error::OracleNotInClass {
            stage: stage.into(),
            residual,
        }
    }
}
