//! Crate-wide error type. Every fallible public operation returns
//! [`Result`](crate::Result) with this enum; panics are reserved for
//! violated internal invariants.

use thiserror::Error;

use crate::family::GateReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,

    #[error("operands belong to different field contexts")]
    ContextMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is a quadratic nonresidue; no square root exists")]
    NoRoot,

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial degree {got} below required minimum {need}")]
    DegreeTooSmall { got: i64, need: i64 },

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("gate failed: {}", .0.failure_reason.as_deref().unwrap_or("discriminant locus"))]
    GateFailed(Box<GateReport>),

    #[error("enumeration of size {needed} exceeds cap {cap}")]
    CapExceeded { needed: u64, cap: u64 },

    #[error("non-integral coefficient: {0}")]
    NonIntegralCoefficient(String),

    #[error("Weil bound violated: {0}")]
    WeilBoundViolated(String),

    #[error("unsupported singularity: {0}")]
    UnsupportedSingularity(String),

    #[error("no annihilating multiple found in the search interval")]
    NoOrderFound,

    #[error("no addition chart applies to the given pair")]
    NoChartApplies,

    #[error("invalid divisor: {0}")]
    InvalidDivisor(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Internal consistency failure: a condition that correct code and valid
    /// inputs can never produce. Surfacing it (rather than panicking) lets
    /// the CLI map it to a distinct exit code.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
