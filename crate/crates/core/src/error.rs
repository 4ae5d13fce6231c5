use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    VarMismatch { expected: usize, found: usize },

    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),

    #[error("jet has zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("map has a nonzero constant term in component {0}")]
    NonzeroConstantTerm(usize),

    #[error("linear part is singular")]
    SingularLinearPart,

    #[error("linear part is not diagonal")]
    NonDiagonalLinearPart,

    #[error("vector field does not vanish at the origin (component {0})")]
    NonVanishingField(usize),

    #[error("coordinate axis {0} is not invariant under the field")]
    AxisNotInvariant(usize),

    #[error("zero eigenvalue along separatrix axis {0}")]
    ZeroAxisEigenvalue(usize),

    #[error("cannot resolve the leafwise division: {0}")]
    NonResolvableDivision(String),

    #[error("map is not tangent to the identity")]
    NotTangentToIdentity,

    #[error("map does not preserve xy (defect {0:.3e})")]
    XyNotPreserved(f64),

    #[error("no normal form of the shape x(1 + w f(w)) fits: {0}")]
    NoNormalForm(String),

    #[error("integration step underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("trajectory left the domain (|x| = {norm:.3e}) at t = {t}")]
    Escaped { t: f64, norm: f64 },

    #[error("map has no usable inverse: {0}")]
    NoInverse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
