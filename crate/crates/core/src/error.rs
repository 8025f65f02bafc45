//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the linear algebra kernels, solvers and generators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not symmetric within the required tolerance")]
    NotSymmetric,

    #[error("matrix is not positive definite (pivot {index} is non-positive)")]
    NotPositiveDefinite { index: usize },

    #[error("SVD sweep did not converge within {sweeps} sweeps")]
    SvdNonConvergence { sweeps: usize },

    #[error("largest singular value is zero")]
    ZeroMatrix,

    #[error("exact line search hit non-positive curvature")]
    NonPositiveCurvature,

    #[error("backtracking step underflowed before sufficient decrease")]
    StepUnderflow,

    #[error("relative-error stop rule requires the exact solution")]
    MissingExactSolution,

    #[error("kernel evaluation is non-finite at (s, t) = ({s}, {t})")]
    KernelSingularity { s: f64, t: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix market format error: {0}")]
    MarketFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn param(detail: impl Into<String>) -> Self {
        Error::InvalidParameter(detail.into())
    }
}
