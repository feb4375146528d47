use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("no primitive {level}-th root of unity in the field")]
    NoRootOfUnity { level: u32 },
    #[error("invalid field descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("characteristic divides {0}")]
    BadCharacteristic(u64),
    #[error("curve is singular")]
    SingularCurve,
    #[error("{level}-torsion is not rational over the field")]
    TorsionNotRational { level: u32 },
    #[error("no curve with rational {level}-torsion over F_{p}")]
    NoCurveFound { p: u64, level: u32 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("scaling factor is zero")]
    ZeroScalar,
    #[error("characteristic {characteristic} too small for truncation order {order}")]
    CharacteristicTooSmall { characteristic: u64, order: usize },
    #[error("degenerate divisor: {0}")]
    DegenerateDivisor(String),
    #[error("the identity point is not allowed here")]
    IdentityPoint,
    #[error("divisor index outside the torsion table")]
    UnsupportedDivisor,
    #[error("point is not in the torsion table")]
    PointNotTorsion,
    #[error("no rational division preimage available")]
    PreimageUnavailable,
    #[error("unknown identity {0}")]
    IdentityUnknown(String),
    #[error("identity cannot be checked here: {0}")]
    PreconditionUnsatisfiable(String),
    #[error("not enough torsion points for reconstruction")]
    InsufficientPoints,
    #[error("argument too close to a lattice point")]
    PoleProximity,
    #[error("torsion index is zero")]
    ZeroTorsionIndex,
    #[error("degenerate triple of arguments")]
    DegenerateTriple,
    #[error("fiber enumeration failed: {0}")]
    FiberEnumerationFailure(String),
    #[error("rank deficit in the value space (got {got}, expected {expected}); retry with another curve")]
    RetryNeeded { got: usize, expected: usize },
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("root-of-unity conventions differ")]
    ConventionMismatch,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("evaluation hit a zero or pole")]
    EvaluationPole,
}

pub type Result<T> = std::result::Result<T, Error>;
