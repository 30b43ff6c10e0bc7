use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet order {got} is below the required {need}")]
    InsufficientOrder { need: usize, got: usize },

    #[error("mismatched jets: {0}")]
    Mismatch(String),

    #[error("non-finite value")]
    NonFinite,

    #[error("singular denominator")]
    SingularDenominator,

    #[error("Möbius singularity: cf + d vanishes")]
    MobiusSingularity,

    #[error("degenerate Möbius transformation: ad - bc = 0")]
    DegenerateMobius,

    #[error("singular matrix: determinant is zero")]
    SingularMatrix,

    #[error("determinant {det} is not 1")]
    NotUnimodular { det: f64 },

    #[error("critical point: first derivative vanishes")]
    CriticalPoint,

    #[error("gauge-singular point: 1 + 2 tr(A f) vanishes")]
    GaugeSingular,

    #[error("pole of the solution family at t = {t}")]
    Pole { t: f64 },

    #[error("approaching critical point at t = {t}")]
    ApproachingCriticalPoint { t: f64 },

    #[error("blow-up: exp(x) exceeds {bound} at t = {t}")]
    BlowUp { t: f64, bound: f64 },

    #[error("not a loop: {0}")]
    NotALoop(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
