use thiserror::Error;

/// Errors raised by constructions and evaluations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate pmf")]
    DegeneratePmf,

    #[error("negative weight {weight} at level {level}")]
    NegativeWeight { level: i64, weight: String },

    #[error("classes overlap, no minimax test")]
    ClassesOverlap,

    #[error("not absolutely continuous")]
    NotAbsolutelyContinuous,

    #[error("KL radii too large, hypotheses overlap")]
    KlRadiiTooLarge,

    #[error("contamination too large")]
    ContaminationTooLarge,

    #[error("map not nondecreasing")]
    MapNotNondecreasing,

    #[error("product rule invalid for divergence-ball classes")]
    ProductRuleInvalid,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("level {level} is not valid for sensor {sensor}")]
    InvalidLevel { sensor: usize, level: i64 },

    #[error("sensor {sensor}: per-level llr is not nondecreasing")]
    NotMonotone { sensor: usize },

    #[error("uninformative channel (pmf0 = pmf1)")]
    Uninformative,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
