//! Numerical toolbox for g-frame multipliers on discretized measure spaces.
//!
//! The measure space is a finite weighted point set; a g-frame is an indexed
//! family of block operators `Λ_i: H → K_i` with quadrature weights standing
//! in for the measure. On top of the frame machinery (frame operator, bounds,
//! analysis/synthesis, duals) the crate builds symbol-weighted multipliers
//! `M = Σ_i w_i m_i Λ_i* Θ_i`, invertibility certificates with predicted
//! inverse-norm intervals, and an anchored Neumann inverter whose truncation
//! error is certified term by term against a direct-inversion oracle.

pub mod error;
pub mod gframe;
pub mod invertibility;
pub mod multiplier;
pub mod opalgebra;

pub use error::{Error, Result};

/// Complex scalar used throughout. Re-exported from nalgebra so all modules
/// agree on the underlying num-complex version.
pub type Cx = nalgebra::Complex<f64>;
/// Dense complex matrix (blocks may be rectangular).
pub type CMatrix = nalgebra::DMatrix<Cx>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Cx>;

/// Default relative threshold on `λ_min/λ_max` for the "is a frame" decision.
pub const DEFAULT_FRAME_TOL: f64 = 1e-10;
/// Default absolute operator-norm deviation from `I` accepted by dual checks.
pub const DEFAULT_DUAL_TOL: f64 = 1e-9;
/// Relative width of the borderline band around certificate condition
/// boundaries; margins inside the band do not count as satisfied.
pub const DEFAULT_BOUNDARY_EPS: f64 = 1e-12;
/// Relative singular-value cutoff below which an operator is reported as
/// numerically singular rather than inverted.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;
/// Relative tolerance for accepting an operator as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute slack granted when validating proved bounds numerically.
pub const VALIDATION_SLACK: f64 = 1e-10;

/// Tolerance knobs shared by frame decisions, dual tests and certificate
/// boundaries. Scenario files may override any of them.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Tolerances {
    /// Relative `λ_min/λ_max` threshold for the frame decision.
    pub frame_tol: f64,
    /// Absolute deviation from `I` accepted by dual tests.
    pub dual_tol: f64,
    /// Relative width of the borderline band at condition boundaries.
    pub boundary_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            frame_tol: DEFAULT_FRAME_TOL,
            dual_tol: DEFAULT_DUAL_TOL,
            boundary_eps: DEFAULT_BOUNDARY_EPS,
        }
    }
}

/// A recorded numeric comparison, kept so that every asserted inequality is
/// auditable from reports and error messages.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Inequality {
    /// Left-hand side of the claim.
    pub lhs: f64,
    /// Right-hand side of the claim.
    pub rhs: f64,
    /// Signed slack before the claim fails: `rhs − lhs` for `≤` claims,
    /// `lhs − rhs` for `≥` claims. Negative beyond the granted slack
    /// means violated.
    pub margin: f64,
    /// Absolute slack granted to the claim.
    pub slack: f64,
    /// Whether the claim holds with the slack applied.
    pub holds: bool,
}

impl Inequality {
    /// Record the claim `lhs ≤ rhs + slack`.
    pub fn le(lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = rhs - lhs;
        Inequality {
            lhs,
            rhs,
            margin,
            slack,
            holds: margin >= -slack,
        }
    }

    /// Record the claim `lhs ≥ rhs − slack`.
    pub fn ge(lhs: f64, rhs: f64, slack: f64) -> Self {
        let margin = lhs - rhs;
        Inequality {
            lhs,
            rhs,
            margin,
            slack,
            holds: margin >= -slack,
        }
    }
}
