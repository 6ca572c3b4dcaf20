use thiserror::Error;

/// Failures raised by the geometric constructions and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("inner product is degenerate")]
    DegenerateForm,
    #[error("basis is numerically singular (condition number {0:.3e})")]
    DegenerateBasis(f64),
    #[error("matrix is not idempotent (relative residual {0:.3e})")]
    NotIdempotent(f64),
    #[error("subspace is not invariant (relative residual {0:.3e})")]
    NotInvariant(f64),
    #[error("square root unavailable: {0}")]
    SqrtDomain(String),
    #[error("isotropic point: the form vanishes on it")]
    IsotropicPoint,
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,
    #[error("quadric is singular")]
    SingularQuadric,
    #[error("gradient vanishes: singular point of the quadric")]
    ZeroGradient,
    #[error("operation supports only projective planes, got ambient dimension {0}")]
    UnsupportedDimension(usize),
    #[error("parameter {0} is a singular parameter of the pencil")]
    SingularParameter(f64),
    #[error("point does not lie on both quadrics")]
    NotAnIntersectionPoint,
    #[error("quadrics are projectively identical")]
    IdenticalQuadrics,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("quadric is not a p-quadric for the given projection")]
    NotPQuadric,
    #[error("parameter {lambda} lies outside the admissible interval ({lo}, {hi})")]
    OutOfDomain { lambda: f64, lo: f64, hi: f64 },
    #[error("point does not lie on the base quadric")]
    NotOnQuadric,
    #[error("point does not lie on both quadrics")]
    NotOnBothQuadrics,
    #[error("vector does not lie in the image of the projection")]
    NotInImage,
    #[error("chart failure: {0}")]
    ChartFailure(String),
    #[error("form p - l'^2 is singular")]
    SingularForm,
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("unknown tolerance name `{0}`")]
    UnknownTolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
