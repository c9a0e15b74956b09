use thiserror::Error;

/// Errors raised by the geometry kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("not curvature-adapted: commutator residual {residual:e} exceeds {threshold:e}")]
    NotCurvatureAdapted { residual: f64, threshold: f64 },

    #[error("point is not on the space (constraint residual {0:e})")]
    NotOnSpace(f64),

    #[error("vector is not tangent at the base point (residual {0:e})")]
    NotTangent(f64),

    #[error("vector is not unit (squared norm {0})")]
    NotUnit(f64),

    #[error("tangent vectors have different base points")]
    BasePointMismatch,

    #[error("product structure needs exactly two top-level factors, found {0}")]
    NotTwoFactorProduct(usize),

    #[error("point is off the hypersurface (distance {0:e})")]
    OffHypersurface(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curve rejected: {0}")]
    CurveRejected(String),

    #[error("focal point reached: immersion scale factor {0:e} is within 1e-10 of zero")]
    FocalPoint(f64),

    #[error("degenerate frame (condition number {0:e})")]
    DegenerateFrame(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
