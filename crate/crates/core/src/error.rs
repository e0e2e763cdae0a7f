use alloc::string::String;

/// Errors raised by the solver and its building blocks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix or vector contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shift {alpha:e} is too close to the smallest eigenvalue {min_eigenvalue:e}")]
    ShiftTooClose { alpha: f64, min_eigenvalue: f64 },
    #[error("denominator is not positive")]
    DegenerateDenominator,
    #[error("no finite minimizer; infimum {infimum:e} is approached at infinity")]
    UnboundedBelow { infimum: f64 },
    #[error("gamma = {0:e} is not positive; denominator is not bounded away from zero")]
    NonPositiveGamma(f64),
    #[error("invalid working-set size: {0}")]
    InvalidK(String),
    #[error("swapping needs {needed} support and zero coordinates, found {support} and {zeros}")]
    InsufficientCoordinates { needed: usize, support: usize, zeros: usize },
    #[error("objective is undefined at the zero vector")]
    ZeroVector,
    #[error("denominator xᵀCx = {0:e} collapsed below the positivity floor")]
    DenominatorCollapse(f64),
    #[error("enumeration of {0} blocks exceeds the limit")]
    TooLarge(u128),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("fisher discriminant analysis needs samples from both classes")]
    SingleClass,
    #[error("the truncated power method requires C = I")]
    RequiresIdentityC,
    #[error("iteration limit reached in {0}")]
    NoConvergence(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
