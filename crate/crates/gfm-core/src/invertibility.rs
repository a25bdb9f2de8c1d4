//! Invertibility certificates and certified Neumann inversion.
//!
//! Four sufficient conditions guarantee that a multiplier is invertible; each
//! one, when satisfied, yields a predicted interval for the inverse gain, a
//! contraction ratio `r < 1` and a prefactor `c` such that truncating the
//! anchored Neumann series after `n` terms leaves an error of at most
//! `r^{n+1}·c`. The module also verifies the unconditional necessary
//! conditions that hold whenever a multiplier is invertible, and the
//! perturbation test that promotes a perturbed family to a frame.
//!
//! Every bound asserted here is validated against the direct (SVD) inverse;
//! a failure is reported as `TheoremViolation`, which signals a bug in this
//! crate rather than bad input.

use crate::error::{Error, Result};
use crate::gframe::{estimate_nu, FrameBounds, GFrameFamily};
use crate::multiplier::{assemble_multiplier, dual_check_with_tol, Symbol};
use crate::opalgebra::OperatorH;
use crate::{Inequality, Tolerances, VALIDATION_SLACK};
use std::fmt;
use std::str::FromStr;

/// Which sufficient condition a certificate came from.
///
/// The wire identifiers (`thm_main`, `cooor`, `combined`, `dualframes`) are
/// part of the CLI and report contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    /// Real positive symbol with a perturbed second family.
    PositiveSymbol,
    /// Symbol close to one, single family.
    NearOne,
    /// Symbol close to one and a perturbed second family.
    Combined,
    /// Symbol close to one on a dual pair.
    DualPair,
}

impl CertKind {
    pub const ALL: [CertKind; 4] = [
        CertKind::PositiveSymbol,
        CertKind::NearOne,
        CertKind::Combined,
        CertKind::DualPair,
    ];

    /// Stable identifier used in CLI arguments and reports.
    pub fn id(&self) -> &'static str {
        match self {
            CertKind::PositiveSymbol => "thm_main",
            CertKind::NearOne => "cooor",
            CertKind::Combined => "combined",
            CertKind::DualPair => "dualframes",
        }
    }
}

impl fmt::Display for CertKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for CertKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm_main" => Ok(CertKind::PositiveSymbol),
            "cooor" => Ok(CertKind::NearOne),
            "combined" => Ok(CertKind::Combined),
            "dualframes" => Ok(CertKind::DualPair),
            other => Err(Error::ValidationError(format!(
                "unknown certificate id '{other}' (expected thm_main, cooor, combined or dualframes)"
            ))),
        }
    }
}

/// Operator anchoring the Neumann series of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorId {
    /// `M_{m,Λ,Λ}`, the symbol-weighted frame operator.
    WeightedFrameOperator,
    /// `S_Λ`.
    FrameOperator,
    /// `I`; the series is plain powers of `I − M`.
    Identity,
}

/// Numeric hypothesis data a certificate was evaluated on.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CertInputs {
    /// Lower frame bound `A_Λ`.
    pub frame_lower: f64,
    /// Upper frame bound `B_Λ`.
    pub frame_upper: f64,
    /// Upper bound of the second family (`B_Θ` or `B_{Λd}`) when used.
    pub second_upper: Option<f64>,
    /// Perturbation level ν when the condition involves one.
    pub nu: Option<f64>,
    /// Essential infimum δ of a real positive symbol.
    pub delta: Option<f64>,
    /// `‖m − 1‖∞` when the condition involves it.
    pub near_one_dist: Option<f64>,
    /// `‖m‖∞`.
    pub symbol_sup: f64,
}

/// Predicted consequences of a satisfied certificate.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct InversePrediction {
    /// Lower bound on the inverse gain `‖M⁻¹f‖/‖f‖`.
    pub inv_lower: f64,
    /// Upper bound on `‖M⁻¹‖`.
    pub inv_upper: f64,
    /// Neumann contraction ratio `r ∈ [0, 1)`.
    pub ratio: f64,
    /// Truncation prefactor `c`; the error after `n` terms is ≤ `r^{n+1}·c`.
    pub prefactor: f64,
}

/// Outcome of evaluating one sufficient condition on concrete inputs.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub inputs: CertInputs,
    /// Condition LHS and RHS; satisfied means `lhs < rhs` strictly, clear of
    /// the borderline band.
    pub condition_lhs: f64,
    pub condition_rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    /// Within the boundary band: numerically indistinguishable from the
    /// condition boundary, reported unsatisfied.
    pub borderline: bool,
    pub satisfied: bool,
    /// Present exactly when satisfied.
    pub prediction: Option<InversePrediction>,
    pub anchor_id: AnchorId,
    #[serde(skip)]
    anchor_op: OperatorH,
}

impl Certificate {
    /// The anchor operator `P` of this certificate's Neumann series,
    /// assembled fresh when the certificate was built.
    pub fn anchor_operator(&self) -> &OperatorH {
        &self.anchor_op
    }

    #[allow(clippy::too_many_arguments)]
    fn evaluate(
        kind: CertKind,
        inputs: CertInputs,
        lhs: f64,
        rhs: f64,
        boundary_eps: f64,
        prediction: impl FnOnce() -> InversePrediction,
        anchor_id: AnchorId,
        anchor_op: OperatorH,
    ) -> Certificate {
        let margin = rhs - lhs;
        let eps = boundary_eps * lhs.abs().max(rhs.abs());
        let borderline = margin.abs() <= eps;
        let satisfied = margin > eps;
        Certificate {
            kind,
            inputs,
            condition_lhs: lhs,
            condition_rhs: rhs,
            margin,
            borderline,
            satisfied,
            prediction: satisfied.then(prediction),
            anchor_id,
            anchor_op,
        }
    }
}

fn check_symbol_len(m: &Symbol, family: &GFrameFamily) -> Result<()> {
    if m.len() != family.len() {
        return Err(Error::DimError(format!(
            "symbol has {} values, family has {} points",
            m.len(),
            family.len()
        )));
    }
    Ok(())
}

fn require_frame(family: &GFrameFamily, frame_tol: f64) -> Result<FrameBounds> {
    let bounds = family.frame_bounds(frame_tol);
    if !bounds.is_frame {
        return Err(Error::NotAFrame {
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    Ok(bounds)
}

/// Resolve the perturbation level: the measured tight bound, or a user
/// override that must not undercut it.
fn resolve_nu(
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
    nu_override: Option<f64>,
) -> Result<f64> {
    let estimate = estimate_nu(lambda, theta)?;
    match nu_override {
        None => Ok(estimate),
        Some(v) if !v.is_finite() || v < 0.0 => Err(Error::ValidationError(format!(
            "ν override must be a nonnegative finite number, got {v}"
        ))),
        Some(v) if v < estimate * (1.0 - 1e-9) => Err(Error::ValidationError(format!(
            "ν override {v:.6e} is below the measured perturbation level {estimate:.6e}"
        ))),
        Some(v) => Ok(v.max(estimate)),
    }
}

/// Certificate for a real positive symbol against a perturbed family:
/// requires `(‖m‖∞/δ)·√ν < A_Λ/√B_Λ`; anchors the series at `M_{m,Λ,Λ}`.
pub fn cert_thm_main(
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
    m: &Symbol,
    nu_override: Option<f64>,
    tol: &Tolerances,
) -> Result<Certificate> {
    let bounds = require_frame(lambda, tol.frame_tol)?;
    check_symbol_len(m, lambda)?;
    if m.max_imag_abs() > 1e-12 * m.sup_norm() {
        return Err(Error::SymbolNotPositive(format!(
            "max |Im m| = {:.3e} exceeds 1e-12·‖m‖∞",
            m.max_imag_abs()
        )));
    }
    let delta = m.min_real();
    if delta <= 0.0 {
        return Err(Error::SymbolNotPositive(format!(
            "min Re m = {delta:.3e} is not positive"
        )));
    }
    let nu = resolve_nu(lambda, theta, nu_override)?;
    let sup = m.sup_norm();
    let (a, b) = (bounds.lower, bounds.upper);
    let lhs = (sup / delta) * nu.sqrt();
    let rhs = a / b.sqrt();
    let inputs = CertInputs {
        frame_lower: a,
        frame_upper: b,
        second_upper: Some(theta.frame_bounds(tol.frame_tol).upper),
        nu: Some(nu),
        delta: Some(delta),
        near_one_dist: None,
        symbol_sup: sup,
    };
    let anchor = assemble_multiplier(m, lambda, lambda)?;
    Ok(Certificate::evaluate(
        CertKind::PositiveSymbol,
        inputs,
        lhs,
        rhs,
        tol.boundary_eps,
        || {
            let root = sup * (nu * b).sqrt();
            InversePrediction {
                inv_lower: 1.0 / (sup * b + root),
                inv_upper: 1.0 / (delta * a - root),
                ratio: root / (delta * a),
                prefactor: 1.0 / (delta * a - root),
            }
        },
        AnchorId::WeightedFrameOperator,
        anchor,
    ))
}

/// Certificate for a symbol near one on a single frame: requires
/// `‖m−1‖∞ < A_Λ/B_Λ`; anchors at `S_Λ`.
pub fn cert_cooor(lambda: &GFrameFamily, m: &Symbol, tol: &Tolerances) -> Result<Certificate> {
    let bounds = require_frame(lambda, tol.frame_tol)?;
    check_symbol_len(m, lambda)?;
    let (a, b) = (bounds.lower, bounds.upper);
    let dist = m.dist_to_one();
    let inputs = CertInputs {
        frame_lower: a,
        frame_upper: b,
        second_upper: None,
        nu: None,
        delta: None,
        near_one_dist: Some(dist),
        symbol_sup: m.sup_norm(),
    };
    let anchor = lambda.frame_operator();
    Ok(Certificate::evaluate(
        CertKind::NearOne,
        inputs,
        dist,
        a / b,
        tol.boundary_eps,
        || InversePrediction {
            inv_lower: 1.0 / ((dist + 1.0) * b),
            inv_upper: 1.0 / (a - dist * b),
            ratio: dist * b / a,
            prefactor: 1.0 / (a - dist * b),
        },
        AnchorId::FrameOperator,
        anchor,
    ))
}

/// Combined certificate, symbol near one plus perturbation: requires
/// `‖m−1‖∞ < (A_Λ − √(νB_Λ))/(B_Λ + √(νB_Λ))`; anchors at `M_{m,Λ,Λ}`.
///
/// At ν = 0 the two families are weakly equal and the whole statement
/// degenerates to [`cert_cooor`]; the certificate then carries that one's
/// ratio and `S_Λ` anchor so the reduction is exact, not just the bounds.
pub fn cert_combined(
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
    m: &Symbol,
    nu_override: Option<f64>,
    tol: &Tolerances,
) -> Result<Certificate> {
    let bounds = require_frame(lambda, tol.frame_tol)?;
    check_symbol_len(m, lambda)?;
    let nu = resolve_nu(lambda, theta, nu_override)?;
    let (a, b) = (bounds.lower, bounds.upper);
    let root = (nu * b).sqrt();
    let dist = m.dist_to_one();
    let inputs = CertInputs {
        frame_lower: a,
        frame_upper: b,
        second_upper: Some(theta.frame_bounds(tol.frame_tol).upper),
        nu: Some(nu),
        delta: None,
        near_one_dist: Some(dist),
        symbol_sup: m.sup_norm(),
    };
    let (anchor_id, anchor, ratio) = if nu == 0.0 {
        (AnchorId::FrameOperator, lambda.frame_operator(), dist * b / a)
    } else {
        (
            AnchorId::WeightedFrameOperator,
            assemble_multiplier(m, lambda, lambda)?,
            (dist + 1.0) * root / (a - dist * b),
        )
    };
    Ok(Certificate::evaluate(
        CertKind::Combined,
        inputs,
        dist,
        (a - root) / (b + root),
        tol.boundary_eps,
        || InversePrediction {
            inv_lower: 1.0 / ((dist + 1.0) * (b + root)),
            inv_upper: 1.0 / (a - dist * b - (dist + 1.0) * root),
            ratio,
            prefactor: 1.0 / (a - dist * b - (dist + 1.0) * root),
        },
        anchor_id,
        anchor,
    ))
}

/// Certificate on a dual pair: requires `‖m−1‖∞·√(B_Λ B_{Λd}) < 1`; the
/// series is anchored at the identity, i.e. plain powers of `I − M`.
pub fn cert_dualframes(
    lambda: &GFrameFamily,
    lambda_dual: &GFrameFamily,
    m: &Symbol,
    tol: &Tolerances,
) -> Result<Certificate> {
    let bounds = require_frame(lambda, tol.frame_tol)?;
    let dual_bounds = require_frame(lambda_dual, tol.frame_tol)?;
    check_symbol_len(m, lambda)?;
    let pair = dual_check_with_tol(lambda, lambda_dual, tol.dual_tol)?;
    if !pair.is_dual {
        return Err(Error::NotDualPair {
            deviation: pair.deviation,
            tolerance: tol.dual_tol,
        });
    }
    let dist = m.dist_to_one();
    let prod = (bounds.upper * dual_bounds.upper).sqrt();
    let inputs = CertInputs {
        frame_lower: bounds.lower,
        frame_upper: bounds.upper,
        second_upper: Some(dual_bounds.upper),
        nu: None,
        delta: None,
        near_one_dist: Some(dist),
        symbol_sup: m.sup_norm(),
    };
    let anchor = OperatorH::identity(lambda.ambient_dim());
    Ok(Certificate::evaluate(
        CertKind::DualPair,
        inputs,
        dist * prod,
        1.0,
        tol.boundary_eps,
        || {
            let r = dist * prod;
            InversePrediction {
                inv_lower: 1.0 / (1.0 + r),
                inv_upper: 1.0 / (1.0 - r),
                ratio: r,
                prefactor: 1.0 / (1.0 - r),
            }
        },
        AnchorId::Identity,
        anchor,
    ))
}

/// Partial sums of the anchored Neumann series and their certified errors.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NeumannResult {
    #[serde(skip)]
    pub approx_inverse: OperatorH,
    /// Highest power `n` included in the final partial sum.
    pub terms_used: usize,
    /// Measured contraction `q = ‖P⁻¹‖·‖P−M‖`.
    pub contraction: f64,
    /// `‖P⁻¹‖`, the prefactor scale of the a-priori tail bound.
    pub anchor_inverse_norm: f64,
    /// `‖P⁻¹‖·q^{n+1}/(1−q)` at the final `n`.
    pub a_priori_bound: f64,
    /// `‖M·X_n − I‖`.
    pub a_posteriori_residual: f64,
    /// `‖X_n − M⁻¹‖` against the direct inverse, when that is available.
    pub oracle_gap: Option<f64>,
    /// Oracle gap after every partial sum, index = number of terms beyond
    /// the zeroth.
    pub partial_gaps: Vec<f64>,
}

/// Sum `X_n = Σ_{k=0}^n [P⁻¹(P−M)]^k P⁻¹` until the a-priori tail bound
/// drops below `target_err` or `n_max` terms are used.
///
/// One running power term is maintained, so each step costs a single matrix
/// multiply pair. Requires `q = ‖P⁻¹‖·‖P−M‖ < 1`.
pub fn neumann_invert(
    target: &OperatorH,
    anchor: &OperatorH,
    n_max: usize,
    target_err: f64,
) -> Result<NeumannResult> {
    if target.dim() != anchor.dim() {
        return Err(Error::DimError(format!(
            "target dimension {} differs from anchor dimension {}",
            target.dim(),
            anchor.dim()
        )));
    }
    let anchor_inv = anchor.direct_inverse()?.inverse;
    let anchor_inv_norm = anchor_inv.op_norm();
    let residual_op = anchor - target;
    let q = anchor_inv_norm * residual_op.op_norm();
    if q >= 1.0 {
        return Err(Error::NotContractive { q });
    }
    let tail_bound = |n: usize| anchor_inv_norm * q.powi(n as i32 + 1) / (1.0 - q);

    let oracle = target.direct_inverse().ok().map(|r| r.inverse);
    let gap = |x: &OperatorH| oracle.as_ref().map(|o| (x - o).op_norm());

    let step = &anchor_inv * &residual_op;
    let mut partial = anchor_inv.clone();
    let mut term = anchor_inv;
    let mut partial_gaps = Vec::new();
    if let Some(g) = gap(&partial) {
        partial_gaps.push(g);
    }
    let mut n = 0;
    while n < n_max && tail_bound(n) > target_err {
        term = &step * &term;
        partial = &partial + &term;
        n += 1;
        if let Some(g) = gap(&partial) {
            partial_gaps.push(g);
        }
    }

    let a_posteriori_residual =
        (&(target * &partial) - &OperatorH::identity(target.dim())).op_norm();
    Ok(NeumannResult {
        oracle_gap: partial_gaps.last().copied(),
        approx_inverse: partial,
        terms_used: n,
        contraction: q,
        anchor_inverse_norm: anchor_inv_norm,
        a_priori_bound: tail_bound(n),
        a_posteriori_residual,
        partial_gaps,
    })
}

/// A satisfied certificate's Neumann run plus the numeric validation of
/// everything the certificate predicted.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertifiedInversion {
    pub result: NeumannResult,
    /// `‖M⁻¹‖` from the direct inverse.
    pub inv_norm: f64,
    /// Claim `1/‖M‖ ≥ inv_lower`.
    pub lower_check: Inequality,
    /// Claim `‖M⁻¹‖ ≤ inv_upper`.
    pub upper_check: Inequality,
    /// Worst slack in `gap_n ≤ r^{n+1}·c` over all partial sums (most
    /// negative margin is the tightest).
    pub worst_gap_check: Inequality,
}

/// Run the certificate's anchored Neumann series against `target` and verify
/// every claim: per-term truncation bounds and the predicted inverse-gain
/// interval. Any violation is a `TheoremViolation`.
pub fn run_certified_inversion(
    cert: &Certificate,
    target: &OperatorH,
    n_max: usize,
    target_err: f64,
) -> Result<CertifiedInversion> {
    let prediction = match (&cert.prediction, cert.satisfied) {
        (Some(p), true) => *p,
        _ => {
            return Err(Error::ConditionNotMet(format!(
                "certificate {} is not satisfied (margin {:.3e})",
                cert.kind, cert.margin
            )))
        }
    };
    let result = match neumann_invert(target, &cert.anchor_op, n_max, target_err) {
        Ok(r) => r,
        Err(Error::NotContractive { q }) => {
            return Err(Error::TheoremViolation(format!(
                "certificate {} is satisfied but the measured contraction q = {q:.6} is ≥ 1",
                cert.kind
            )))
        }
        Err(e) => return Err(e),
    };

    let direct = match target.direct_inverse() {
        Ok(r) => r,
        Err(Error::SingularOperator { sigma_min, .. }) => {
            return Err(Error::TheoremViolation(format!(
                "certificate {} is satisfied but the operator is numerically singular (σ_min = {sigma_min:.3e})",
                cert.kind
            )))
        }
        Err(e) => return Err(e),
    };

    let mut worst_gap_check: Option<Inequality> = None;
    for (n, &gap) in result.partial_gaps.iter().enumerate() {
        let analytic = prediction.ratio.powi(n as i32 + 1) * prediction.prefactor;
        let check = Inequality::le(gap, analytic, VALIDATION_SLACK);
        if !check.holds {
            return Err(Error::TheoremViolation(format!(
                "certificate {}: truncation gap {gap:.6e} after {n} terms exceeds the analytic bound {analytic:.6e}",
                cert.kind
            )));
        }
        if worst_gap_check.is_none_or(|w| check.margin < w.margin) {
            worst_gap_check = Some(check);
        }
    }

    let inv_norm = direct.inverse.op_norm();
    let lower_check = Inequality::ge(1.0 / target.op_norm(), prediction.inv_lower, VALIDATION_SLACK);
    if !lower_check.holds {
        return Err(Error::TheoremViolation(format!(
            "certificate {}: minimal gain 1/‖M‖ = {:.6e} is below the predicted lower bound {:.6e}",
            cert.kind, lower_check.lhs, prediction.inv_lower
        )));
    }
    let upper_check = Inequality::le(inv_norm, prediction.inv_upper, VALIDATION_SLACK);
    if !upper_check.holds {
        return Err(Error::TheoremViolation(format!(
            "certificate {}: ‖M⁻¹‖ = {inv_norm:.6e} exceeds the predicted upper bound {:.6e}",
            cert.kind, prediction.inv_upper
        )));
    }

    Ok(CertifiedInversion {
        result,
        inv_norm,
        lower_check,
        upper_check,
        worst_gap_check: worst_gap_check
            .unwrap_or_else(|| Inequality::le(0.0, 0.0, VALIDATION_SLACK)),
    })
}

/// One named eigenvalue inequality inside a report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub check: Inequality,
}

/// Outcome of the unconditional necessary conditions on an invertible
/// multiplier.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NecessaryReport {
    /// False when `M` is numerically singular; no claims are made then.
    pub applicable: bool,
    /// `γ = ‖M⁻¹‖` when applicable.
    pub inv_norm: Option<f64>,
    /// The four lower-frame-bound claims.
    pub checks: Vec<NamedCheck>,
}

impl NecessaryReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.check.holds)
    }
}

/// Verify the four lower-frame-bound inequalities that every invertible
/// multiplier forces: with `γ = ‖M⁻¹‖`,
/// `λ_min(S_{mΘ}) ≥ 1/(B_Λ γ²)`, `λ_min(S_{m̄Λ}) ≥ 1/(B_Θ γ²)`,
/// `λ_min(S_Θ) ≥ 1/(B_Λ ‖m‖∞² γ²)` and `λ_min(S_Λ) ≥ 1/(B_Θ ‖m‖∞² γ²)`.
pub fn necessary_conditions_check(
    m: &Symbol,
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
    tol: &Tolerances,
) -> Result<NecessaryReport> {
    let multiplier = assemble_multiplier(m, lambda, theta)?;
    let inverse = match multiplier.direct_inverse() {
        Ok(r) => r,
        Err(Error::SingularOperator { .. }) => {
            return Ok(NecessaryReport {
                applicable: false,
                inv_norm: None,
                checks: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let gamma_sq = inverse.inverse.op_norm().powi(2);
    let b_lambda = lambda.frame_bounds(tol.frame_tol).upper;
    let b_theta = theta.frame_bounds(tol.frame_tol).upper;
    let sup_sq = m.sup_norm().powi(2);

    let rel = 1e-10;
    let claim = |name: &str, family: &GFrameFamily, denom: f64| -> Result<NamedCheck> {
        let lhs = family.frame_bounds(tol.frame_tol).lower;
        let rhs = 1.0 / denom;
        Ok(NamedCheck {
            name: name.to_string(),
            check: Inequality::ge(lhs, rhs, rel * rhs),
        })
    };

    let scaled_theta = theta.scale(m)?;
    let scaled_lambda = lambda.scale(&m.conj())?;
    let checks = vec![
        claim("scaled_theta_lower", &scaled_theta, b_lambda * gamma_sq)?,
        claim("scaled_lambda_lower", &scaled_lambda, b_theta * gamma_sq)?,
        claim("theta_lower", theta, b_lambda * sup_sq * gamma_sq)?,
        claim("lambda_lower", lambda, b_theta * sup_sq * gamma_sq)?,
    ];
    Ok(NecessaryReport {
        applicable: true,
        inv_norm: Some(inverse.inverse.op_norm()),
        checks,
    })
}

/// Outcome of the perturbation frame test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PerturbationReport {
    pub nu: f64,
    /// Lower frame bound `A_Λ` the perturbation is compared against.
    pub frame_lower: f64,
    /// Whether `ν < A_Λ`; no claims are made otherwise.
    pub condition_met: bool,
    /// Claim `‖I − M_{1,Λ̃,Θ}‖ ≤ √(ν/A_Λ)`.
    pub deviation_check: Option<Inequality>,
    pub theta_bounds: Option<FrameBounds>,
}

impl PerturbationReport {
    /// All claims made by the report hold (vacuously true when the
    /// hypothesis failed).
    pub fn holds(&self) -> bool {
        if !self.condition_met {
            return true;
        }
        self.deviation_check.map(|c| c.holds).unwrap_or(false)
            && self.theta_bounds.map(|b| b.lower > 0.0).unwrap_or(false)
    }
}

/// Test whether a perturbation level `ν < A_Λ` promotes Θ to a frame, and
/// verify the deviation bound `‖I − M_{1,Λ̃,Θ}‖ ≤ √(ν/A_Λ)` behind it.
pub fn theta_frame_check(
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
    nu_override: Option<f64>,
    tol: &Tolerances,
) -> Result<PerturbationReport> {
    let bounds = require_frame(lambda, tol.frame_tol)?;
    let nu = resolve_nu(lambda, theta, nu_override)?;
    if nu >= bounds.lower {
        return Ok(PerturbationReport {
            nu,
            frame_lower: bounds.lower,
            condition_met: false,
            deviation_check: None,
            theta_bounds: None,
        });
    }
    let dual = lambda.canonical_dual()?;
    let mixed = assemble_multiplier(&Symbol::ones(lambda.len()), &dual, theta)?;
    let deviation = (&OperatorH::identity(lambda.ambient_dim()) - &mixed).op_norm();
    let deviation_check = Inequality::le(deviation, (nu / bounds.lower).sqrt(), VALIDATION_SLACK);
    Ok(PerturbationReport {
        nu,
        frame_lower: bounds.lower,
        condition_met: true,
        deviation_check: Some(deviation_check),
        theta_bounds: Some(theta.frame_bounds(tol.frame_tol)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gframe::DiscreteMeasureSpace;
    use crate::CMatrix;
    use crate::Cx;
    use std::sync::Arc;

    fn cx(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    fn parseval_axes() -> GFrameFamily {
        let space = Arc::new(DiscreteMeasureSpace::uniform(2).unwrap());
        let b1 = CMatrix::from_row_slice(1, 2, &[cx(1.0, 0.0), cx(0.0, 0.0)]);
        let b2 = CMatrix::from_row_slice(1, 2, &[cx(0.0, 0.0), cx(1.0, 0.0)]);
        GFrameFamily::new(space, 2, vec![b1, b2]).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn cert_kind_round_trips_through_ids() {
        for kind in CertKind::ALL {
            assert_eq!(kind.id().parse::<CertKind>().unwrap(), kind);
        }
        assert!("nope".parse::<CertKind>().is_err());
    }

    #[test]
    fn neumann_zero_perturbation_stops_immediately() {
        let p = OperatorH::from_diagonal(&[cx(2.0, 0.0), cx(0.5, 0.0)]);
        let r = neumann_invert(&p, &p, 30, 1e-10).unwrap();
        assert_eq!(r.terms_used, 0);
        assert_eq!(r.a_priori_bound, 0.0);
        let direct = p.direct_inverse().unwrap().inverse;
        assert!((&r.approx_inverse - &direct).op_norm() <= 1e-14);
    }

    #[test]
    fn neumann_geometric_series_gaps() {
        // M = 1.1·I anchored at I: the partial sum is Σ (−0.1)^k and the
        // true gap after n terms is 0.1^{n+1}/1.1, under the a-priori
        // bound 0.1^{n+1}/0.9.
        let m = OperatorH::identity(2).scale(cx(1.1, 0.0));
        let p = OperatorH::identity(2);
        let r = neumann_invert(&m, &p, 10, 0.0).unwrap();
        assert_eq!(r.terms_used, 10);
        assert!((r.contraction - 0.1).abs() <= 1e-13);
        for (n, &gap) in r.partial_gaps.iter().enumerate() {
            let exact = 0.1_f64.powi(n as i32 + 1) / 1.1;
            let bound = 0.1_f64.powi(n as i32 + 1) / 0.9;
            assert!((gap - exact).abs() <= 1e-13, "n={n}: gap {gap} vs {exact}");
            assert!(gap <= bound + 1e-15);
        }
    }

    #[test]
    fn neumann_rejects_non_contractive() {
        let m = OperatorH::identity(2).scale(cx(3.0, 0.0));
        let p = OperatorH::identity(2);
        assert!(matches!(
            neumann_invert(&m, &p, 10, 0.0),
            Err(Error::NotContractive { .. })
        ));
    }

    #[test]
    fn thm_main_trivial_self_case() {
        let fam = parseval_axes();
        let cert = cert_thm_main(&fam, &fam, &Symbol::ones(2), None, &tol()).unwrap();
        assert!(cert.satisfied);
        let p = cert.prediction.unwrap();
        assert!((p.inv_lower - 1.0).abs() <= 1e-12);
        assert!((p.inv_upper - 1.0).abs() <= 1e-12);
        assert_eq!(p.ratio, 0.0);
    }

    #[test]
    fn thm_main_scaled_theta() {
        let fam = parseval_axes();
        let theta = fam
            .scale(&Symbol::constant(cx(1.1, 0.0), 2))
            .unwrap();
        let cert = cert_thm_main(&fam, &theta, &Symbol::ones(2), None, &tol()).unwrap();
        assert!(cert.satisfied);
        assert!((cert.condition_lhs - 0.1).abs() <= 1e-12);
        assert!((cert.condition_rhs - 1.0).abs() <= 1e-12);
        let p = cert.prediction.unwrap();
        assert!((p.inv_lower - 1.0 / 1.1).abs() <= 1e-12);
        assert!((p.inv_upper - 1.0 / 0.9).abs() <= 1e-12);
        assert!((p.ratio - 0.1).abs() <= 1e-12);
        // M = 1.1·I: actual inverse norm sits inside the interval.
        let m_op = assemble_multiplier(&Symbol::ones(2), &fam, &theta).unwrap();
        let inv_norm = m_op.direct_inverse().unwrap().inverse.op_norm();
        assert!(p.inv_lower - 1e-12 <= inv_norm && inv_norm <= p.inv_upper + 1e-12);
    }

    #[test]
    fn thm_main_condition_fails_on_small_delta() {
        // ν = 0.25, m = (0.4, 1): LHS = (1/0.4)·0.5 = 1.25 > 1 = RHS.
        let fam = parseval_axes();
        let theta = fam
            .scale(&Symbol::constant(cx(1.5, 0.0), 2))
            .unwrap();
        let m = Symbol::from_reals(&[0.4, 1.0]).unwrap();
        let cert = cert_thm_main(&fam, &theta, &m, None, &tol()).unwrap();
        assert!(!cert.satisfied);
        assert!((cert.condition_lhs - 1.25).abs() <= 1e-12);
        assert!(cert.prediction.is_none());
    }

    #[test]
    fn thm_main_rejects_complex_symbol() {
        let fam = parseval_axes();
        let m = Symbol::new(vec![cx(1.0, 0.5), cx(1.0, 0.0)]).unwrap();
        assert!(matches!(
            cert_thm_main(&fam, &fam, &m, None, &tol()),
            Err(Error::SymbolNotPositive(_))
        ));
    }

    #[test]
    fn thm_main_rejects_undercutting_override() {
        let fam = parseval_axes();
        let theta = fam
            .scale(&Symbol::constant(cx(1.1, 0.0), 2))
            .unwrap();
        assert!(matches!(
            cert_thm_main(&fam, &theta, &Symbol::ones(2), Some(0.001), &tol()),
            Err(Error::ValidationError(_))
        ));
    }

    #[test]
    fn cooor_interval_and_tightness() {
        let fam = parseval_axes();
        let m = Symbol::from_reals(&[1.2, 0.9]).unwrap();
        let cert = cert_cooor(&fam, &m, &tol()).unwrap();
        assert!(cert.satisfied);
        let p = cert.prediction.unwrap();
        assert!((p.inv_lower - 1.0 / 1.2).abs() <= 1e-12);
        assert!((p.inv_upper - 1.0 / 0.8).abs() <= 1e-12);
        assert!((p.ratio - 0.2).abs() <= 1e-12);
        // M = diag(1.2, 0.9): the lower end of the interval is attained.
        let m_op = assemble_multiplier(&m, &fam, &fam).unwrap();
        let min_gain = 1.0 / m_op.op_norm();
        assert!((min_gain - p.inv_lower).abs() <= 1e-12);
        let inv_norm = m_op.direct_inverse().unwrap().inverse.op_norm();
        assert!((inv_norm - 1.0 / 0.9).abs() <= 1e-12);
        assert!(inv_norm <= p.inv_upper + 1e-12);
    }

    #[test]
    fn cooor_sufficiency_is_not_necessity() {
        let fam = parseval_axes();
        let m = Symbol::from_reals(&[2.0, 0.5]).unwrap();
        let cert = cert_cooor(&fam, &m, &tol()).unwrap();
        assert!(!cert.satisfied);
        // Yet the multiplier diag(2, 0.5) is invertible.
        let m_op = assemble_multiplier(&m, &fam, &fam).unwrap();
        assert!(m_op.direct_inverse().is_ok());
    }

    #[test]
    fn combined_reduces_to_cooor_at_zero_nu() {
        let fam = parseval_axes();
        let m = Symbol::from_reals(&[1.2, 0.9]).unwrap();
        let near = cert_cooor(&fam, &m, &tol()).unwrap();
        let comb = cert_combined(&fam, &fam, &m, None, &tol()).unwrap();
        assert_eq!(near.satisfied, comb.satisfied);
        let (pn, pc) = (near.prediction.unwrap(), comb.prediction.unwrap());
        assert!((pn.inv_lower - pc.inv_lower).abs() <= 1e-14);
        assert!((pn.inv_upper - pc.inv_upper).abs() <= 1e-14);
        assert!((pn.ratio - pc.ratio).abs() <= 1e-14);
    }

    #[test]
    fn combined_scalar_cases() {
        let fam = parseval_axes();
        let theta = fam
            .scale(&Symbol::constant(cx(1.1, 0.0), 2))
            .unwrap();
        let unit = cert_combined(&fam, &theta, &Symbol::ones(2), None, &tol()).unwrap();
        assert!(unit.satisfied);
        assert!((unit.condition_rhs - 0.9 / 1.1).abs() <= 1e-12);
        let p = unit.prediction.unwrap();
        assert!((p.inv_lower - 1.0 / 1.1).abs() <= 1e-12);
        assert!((p.inv_upper - 1.0 / 0.9).abs() <= 1e-12);

        let m = Symbol::constant(cx(1.5, 0.0), 2);
        let cert = cert_combined(&fam, &theta, &m, None, &tol()).unwrap();
        assert!(cert.satisfied);
        let p = cert.prediction.unwrap();
        assert!((p.inv_lower - 1.0 / 1.65).abs() <= 1e-12);
        assert!((p.inv_upper - 1.0 / 0.35).abs() <= 1e-12);
        let m_op = assemble_multiplier(&m, &fam, &theta).unwrap();
        let inv_norm = m_op.direct_inverse().unwrap().inverse.op_norm();
        assert!((inv_norm - 1.0 / 1.65).abs() <= 1e-12);
        assert!(inv_norm <= p.inv_upper + 1e-12);
    }

    #[test]
    fn dualframes_diagonal_cases() {
        let fam = parseval_axes();
        let unit = cert_dualframes(&fam, &fam, &Symbol::ones(2), &tol()).unwrap();
        assert!(unit.satisfied);
        let p = unit.prediction.unwrap();
        assert!((p.inv_lower - 1.0).abs() <= 1e-12 && (p.inv_upper - 1.0).abs() <= 1e-12);

        let m = Symbol::from_reals(&[1.5, 0.5]).unwrap();
        let cert = cert_dualframes(&fam, &fam, &m, &tol()).unwrap();
        assert!(cert.satisfied);
        let p = cert.prediction.unwrap();
        assert!((p.ratio - 0.5).abs() <= 1e-12);
        let m_op = assemble_multiplier(&m, &fam, &fam).unwrap();
        let inv_norm = m_op.direct_inverse().unwrap().inverse.op_norm();
        assert!((inv_norm - 2.0).abs() <= 1e-12);
        assert!((p.inv_upper - 2.0).abs() <= 1e-12);
        assert!((1.0 / m_op.op_norm() - p.inv_lower).abs() <= 1e-12);

        let wide = Symbol::from_reals(&[2.1, 1.0]).unwrap();
        let cert = cert_dualframes(&fam, &fam, &wide, &tol()).unwrap();
        assert!(!cert.satisfied);
    }

    #[test]
    fn dualframes_rejects_non_dual_pair() {
        let fam = parseval_axes();
        let theta = fam
            .scale(&Symbol::constant(cx(2.0, 0.0), 2))
            .unwrap();
        assert!(matches!(
            cert_dualframes(&fam, &theta, &Symbol::ones(2), &tol()),
            Err(Error::NotDualPair { .. })
        ));
    }

    #[test]
    fn certified_inversion_validates_scalar_case() {
        let fam = parseval_axes();
        let theta = fam
            .scale(&Symbol::constant(cx(1.1, 0.0), 2))
            .unwrap();
        let m = Symbol::ones(2);
        let cert = cert_thm_main(&fam, &theta, &m, None, &tol()).unwrap();
        let target = assemble_multiplier(&m, &fam, &theta).unwrap();
        let run = run_certified_inversion(&cert, &target, 20, 0.0).unwrap();
        assert!(run.lower_check.holds && run.upper_check.holds);
        for (n, &gap) in run.result.partial_gaps.iter().enumerate() {
            let bound = 0.1_f64.powi(n as i32 + 1) / 0.9;
            assert!(gap <= bound + 1e-10);
        }
    }

    #[test]
    fn certified_inversion_rejects_unsatisfied_cert() {
        let fam = parseval_axes();
        let m = Symbol::from_reals(&[2.0, 0.5]).unwrap();
        let cert = cert_cooor(&fam, &m, &tol()).unwrap();
        let target = assemble_multiplier(&m, &fam, &fam).unwrap();
        assert!(matches!(
            run_certified_inversion(&cert, &target, 10, 0.0),
            Err(Error::ConditionNotMet(_))
        ));
    }

    #[test]
    fn necessary_conditions_trivial_and_tight() {
        let fam = parseval_axes();
        let unit = necessary_conditions_check(&Symbol::ones(2), &fam, &fam, &tol()).unwrap();
        assert!(unit.applicable && unit.all_hold());
        for c in &unit.checks {
            assert!((c.check.lhs - 1.0).abs() <= 1e-10);
            assert!((c.check.rhs - 1.0).abs() <= 1e-10);
        }

        // m = (2, 0.5): γ = 2, B = 1, ‖m‖∞ = 2. The mΘ claim is tight:
        // λ_min(diag(4, 0.25)) = 0.25 = 1/(B γ²).
        let m = Symbol::from_reals(&[2.0, 0.5]).unwrap();
        let report = necessary_conditions_check(&m, &fam, &fam, &tol()).unwrap();
        assert!(report.applicable && report.all_hold());
        let scaled = report
            .checks
            .iter()
            .find(|c| c.name == "scaled_theta_lower")
            .unwrap();
        assert!((scaled.check.lhs - 0.25).abs() <= 1e-12);
        assert!((scaled.check.rhs - 0.25).abs() <= 1e-12);
        let plain = report.checks.iter().find(|c| c.name == "theta_lower").unwrap();
        assert!((plain.check.lhs - 1.0).abs() <= 1e-12);
        assert!((plain.check.rhs - 1.0 / 16.0).abs() <= 1e-12);
    }

    #[test]
    fn necessary_conditions_singular_is_not_applicable() {
        let fam = parseval_axes();
        let m = Symbol::new(vec![cx(1.0, 0.0), cx(0.0, 0.0)]).unwrap();
        let report = necessary_conditions_check(&m, &fam, &fam, &tol()).unwrap();
        assert!(!report.applicable);
        assert!(report.checks.is_empty());
    }

    #[test]
    fn perturbation_report_trivial_and_scaled() {
        let fam = parseval_axes();
        let same = theta_frame_check(&fam, &fam, None, &tol()).unwrap();
        assert!(same.condition_met && same.holds());
        assert!(same.deviation_check.unwrap().lhs <= 1e-13);

        // Θ = 1.5Λ: ν = 0.25 < 1, deviation exactly 0.5 = √(ν/A).
        let theta = fam
            .scale(&Symbol::constant(cx(1.5, 0.0), 2))
            .unwrap();
        let report = theta_frame_check(&fam, &theta, None, &tol()).unwrap();
        assert!(report.condition_met && report.holds());
        let dev = report.deviation_check.unwrap();
        assert!((dev.lhs - 0.5).abs() <= 1e-12);
        assert!((dev.rhs - 0.5).abs() <= 1e-12);
        assert!((report.theta_bounds.unwrap().lower - 2.25).abs() <= 1e-10);
    }

    #[test]
    fn perturbation_condition_not_met_on_zero_family() {
        let fam = parseval_axes();
        let zero = fam
            .scale(&Symbol::constant(cx(0.0, 0.0), 2))
            .unwrap();
        let report = theta_frame_check(&fam, &zero, None, &tol()).unwrap();
        assert!(!report.condition_met);
        assert!(report.deviation_check.is_none());
        assert!(report.holds());
    }
}
