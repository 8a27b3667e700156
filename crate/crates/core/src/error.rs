use thiserror::Error;

/// Errors raised by model construction and the geometric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("unit ball is not convex: {0}")]
    NotConvex(String),
    #[error("polar profile contains odd harmonic n={0}; only even harmonics give a symmetric ball")]
    NotPeriodic(u32),
    #[error("arc chain is not closed (gap {gap:.3e})")]
    NotClosed { gap: f64 },
    #[error("unit ball is not origin-symmetric: {0}")]
    NotSymmetric(String),
    #[error("tangent break between arcs {index} and {next} (heading jump {jump:.3e})")]
    TangentBreak { index: usize, next: usize, jump: f64 },
    #[error("point at theta={theta} is not smooth")]
    NonSmoothPoint { theta: f64 },
    #[error("linear map is singular (det={det:.3e})")]
    Singular { det: f64 },
    #[error("singular point: gradient or velocity vanishes")]
    SingularPoint,
    #[error("quadratic form is not positive definite (4AB-C^2={disc:.3e})")]
    NotPositiveDefinite { disc: f64 },
    #[error("point at theta={theta} is not flat")]
    NotFlat { theta: f64 },
    #[error("operation requires the {expected} model")]
    WrongModel { expected: &'static str },
    #[error("degenerate request: {0}")]
    Degenerate(String),
    #[error("eps={0} outside the admissible range")]
    BadEps(f64),
    #[error("s={0} outside the curvature function domain")]
    OutOfDomain(f64),
    #[error("circle-pair closure failed (residual {residual:.3e})")]
    TangencySolveFailed { residual: f64 },
    #[error("model file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
