//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of frame, multiplier, and inversion operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operator entries are not finite, or the shape is unusable.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    /// A Hermitian-only routine received a non-Hermitian operator.
    #[error("operator is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// Smallest singular value is below the relative singularity cutoff.
    #[error("operator is numerically singular: σ_min {sigma_min:.3e} < {threshold:.3e}")]
    SingularOperator { sigma_min: f64, threshold: f64 },

    /// Structural mismatch between families, vectors or symbols.
    #[error("dimension mismatch: {0}")]
    DimError(String),

    /// Lower frame bound does not clear the frame tolerance.
    #[error("family is not a frame: lower bound {lower:.3e} with upper bound {upper:.3e}")]
    NotAFrame { lower: f64, upper: f64 },

    /// A certificate requiring a real positive symbol received something else.
    #[error("symbol is not real positive: {0}")]
    SymbolNotPositive(String),

    /// A hypothesis of the requested check does not hold for these inputs.
    #[error("condition not met: {0}")]
    ConditionNotMet(String),

    /// The Neumann contraction ratio is ≥ 1; the series cannot converge.
    #[error("not contractive: q = {q:.6} ≥ 1")]
    NotContractive { q: f64 },

    /// The families handed to the dual-pair certificate are not dual.
    #[error("not a dual pair: ‖S_ΛΘ − I‖ = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotDualPair { deviation: f64, tolerance: f64 },

    /// A proved bound failed numerically; signals an implementation bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    /// Invalid argument outside the other categories.
    #[error("validation error: {0}")]
    ValidationError(String),
}
