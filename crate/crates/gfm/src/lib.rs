//! Scenario layer and CLI plumbing for the g-frame multiplier toolbox:
//! JSON scenario files, seeded random generation with controlled frame-bound
//! ratios and perturbation levels, full-report execution of every check, and
//! parameter sweeps with CSV output.

pub mod generate;
pub mod report;
pub mod scenario;
pub mod sweep;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Harness-level failures, layered over the core error type.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Unparseable scenario or sweep input, with file context.
    #[error("format error in {path}: {detail}")]
    Format { path: String, detail: String },

    /// Structurally invalid input (parsed fine, but inconsistent).
    #[error("validation error: {0}")]
    Validation(String),

    /// Random generation could not meet the requested targets.
    #[error("generation error: {0}")]
    Generation(String),

    #[error(transparent)]
    Core(#[from] gfm_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// True when the error indicates a proved bound failed numerically,
    /// i.e. an implementation bug rather than bad input.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(
            self,
            HarnessError::Core(gfm_core::Error::TheoremViolation(_))
        )
    }
}
