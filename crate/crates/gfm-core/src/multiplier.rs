//! Symbol-weighted multipliers of g-Bessel families.
//!
//! A multiplier sandwiches a pointwise symbol between the analysis map of one
//! family and the synthesis map of another: `M = Σ_i w_i m_i Λ_i* Θ_i`. The
//! unit-symbol multiplier of a family against itself is the frame operator,
//! and the module also carries the algebraic identities this operator obeys
//! (adjoint, symbol rewriting, right composition) plus the dual families an
//! invertible multiplier produces.

use crate::error::{Error, Result};
use crate::gframe::{check_same_structure, GFrameFamily};
use crate::opalgebra::OperatorH;
use crate::{CMatrix, Cx, DEFAULT_DUAL_TOL};

/// Bounded symbol `m ∈ L∞(Ω, μ)` as one complex value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    values: Vec<Cx>,
}

impl Symbol {
    pub fn new(values: Vec<Cx>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::ValidationError("symbol has no values".into()));
        }
        if !values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::ValidationError("symbol has non-finite values".into()));
        }
        Ok(Symbol { values })
    }

    pub fn constant(c: Cx, n: usize) -> Self {
        Symbol {
            values: vec![c; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Symbol::constant(Cx::new(1.0, 0.0), n)
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        Symbol::new(values.iter().map(|&r| Cx::new(r, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Cx] {
        &self.values
    }

    /// `‖m‖∞ = max_i |m_i|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖m − 1‖∞`.
    pub fn dist_to_one(&self) -> f64 {
        self.values
            .iter()
            .map(|z| (z - Cx::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Pointwise complex conjugate `m̄`.
    pub fn conj(&self) -> Symbol {
        Symbol {
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Pointwise `1 − m`, the symbol driving the dual-pair Neumann series.
    pub fn one_minus(&self) -> Symbol {
        Symbol {
            values: self
                .values
                .iter()
                .map(|z| Cx::new(1.0 - z.re, -z.im))
                .collect(),
        }
    }

    /// Real within `tol·‖m‖∞` on the imaginary parts and strictly positive.
    pub fn is_real_positive(&self, rel_imag_tol: f64) -> bool {
        self.max_imag_abs() <= rel_imag_tol * self.sup_norm() && self.min_real() > 0.0
    }
}

/// Assemble `M_{m,Λ,Θ} = Σ_i w_i m_i Λ_i* Θ_i`.
///
/// Summation is in point order, so the result is deterministic and the
/// unit-symbol case reproduces the frame operator bit for bit.
pub fn assemble_multiplier(
    m: &Symbol,
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
) -> Result<OperatorH> {
    check_same_structure(lambda, theta)?;
    if m.len() != lambda.len() {
        return Err(Error::DimError(format!(
            "symbol has {} values, families have {} points",
            m.len(),
            lambda.len()
        )));
    }
    let d = lambda.ambient_dim();
    let mut acc = CMatrix::zeros(d, d);
    for ((lam, th), (&w, &mv)) in lambda
        .blocks()
        .iter()
        .zip(theta.blocks())
        .zip(lambda.weights().iter().zip(m.values()))
    {
        let scale = mv * Cx::new(w, 0.0);
        acc += lam.ad_mul(th) * scale;
    }
    OperatorH::from_matrix(acc)
}

/// Deviation of `M_{m,Λ,Θ}*` from `M_{m̄,Θ,Λ}` in operator norm.
pub fn adjoint_check(m: &Symbol, lambda: &GFrameFamily, theta: &GFrameFamily) -> Result<f64> {
    let forward = assemble_multiplier(m, lambda, theta)?;
    let swapped = assemble_multiplier(&m.conj(), theta, lambda)?;
    Ok((&forward.adjoint() - &swapped).op_norm())
}

/// Max deviation among the symbol-rewriting identities
/// `M_{m,Λ,Θ} = M_{1,m̄Λ,Θ} = M_{1,Λ,mΘ}`.
pub fn rewrite_check(m: &Symbol, lambda: &GFrameFamily, theta: &GFrameFamily) -> Result<f64> {
    let base = assemble_multiplier(m, lambda, theta)?;
    let ones = Symbol::ones(m.len());
    let left = assemble_multiplier(&ones, &lambda.scale(&m.conj())?, theta)?;
    let right = assemble_multiplier(&ones, lambda, &theta.scale(m)?)?;
    let dev_left = (&base - &left).op_norm();
    let dev_right = (&base - &right).op_norm();
    Ok(dev_left.max(dev_right))
}

/// Outcome of a dual-pair test `S_ΛΘ ≈ I`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DualCheck {
    /// `‖S_ΛΘ − I‖`.
    pub deviation: f64,
    pub is_dual: bool,
}

/// Test whether Θ is a dual of Λ, at the given absolute tolerance.
pub fn dual_check_with_tol(
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
    tol: f64,
) -> Result<DualCheck> {
    let mixed = assemble_multiplier(&Symbol::ones(lambda.len()), lambda, theta)?;
    let deviation = (&mixed - &OperatorH::identity(lambda.ambient_dim())).op_norm();
    Ok(DualCheck {
        deviation,
        is_dual: deviation <= tol,
    })
}

pub fn dual_check(lambda: &GFrameFamily, theta: &GFrameFamily) -> Result<DualCheck> {
    dual_check_with_tol(lambda, theta, DEFAULT_DUAL_TOL)
}

/// Outcome of a generalized-dual test: is `S_ΛΘ` invertible, and does the
/// induced family `Λ S_ΘΛ⁻¹` pass the dual test against Θ.
#[derive(Debug, Clone)]
pub struct GDualCheck {
    pub is_gdual: bool,
    /// The mixed operator `S_ΛΘ`.
    pub mixed_operator: OperatorH,
    /// Condition number of `S_ΛΘ` when invertible.
    pub cond: Option<f64>,
    /// Dual-test residual of `Λ S_ΘΛ⁻¹` against Θ when invertible.
    pub residual: Option<f64>,
}

pub fn gdual_check(lambda: &GFrameFamily, theta: &GFrameFamily) -> Result<GDualCheck> {
    let mixed = assemble_multiplier(&Symbol::ones(lambda.len()), lambda, theta)?;
    match mixed.direct_inverse() {
        Err(Error::SingularOperator { .. }) => Ok(GDualCheck {
            is_gdual: false,
            mixed_operator: mixed,
            cond: None,
            residual: None,
        }),
        Err(e) => Err(e),
        Ok(inv) => {
            let swapped = assemble_multiplier(&Symbol::ones(lambda.len()), theta, lambda)?;
            let swapped_inv = swapped.direct_inverse()?;
            let induced = lambda.right_compose(&swapped_inv.inverse)?;
            let residual = dual_check(&induced, theta)?.deviation;
            Ok(GDualCheck {
                is_gdual: true,
                mixed_operator: mixed,
                cond: Some(inv.cond),
                residual: Some(residual),
            })
        }
    }
}

/// Dual families produced by an invertible multiplier.
#[derive(Debug, Clone)]
pub struct DualsFromInvertible {
    /// `m̄Λ M_{m̄,Θ,Λ}⁻¹`, a dual of Θ.
    pub dual_of_theta: GFrameFamily,
    /// `mΘ M_{m,Λ,Θ}⁻¹`, a dual of Λ.
    pub dual_of_lambda: GFrameFamily,
    /// Dual-test residual of the Θ-dual candidate.
    pub theta_residual: f64,
    /// Dual-test residual of the Λ-dual candidate.
    pub lambda_residual: f64,
}

/// Build both dual candidates from an invertible `M_{m,Λ,Θ}` and measure how
/// far each is from being an exact dual.
///
/// Inversion goes through the direct (SVD) route so the residuals test the
/// dual algebra, not the Neumann machinery.
pub fn duals_from_invertible(
    m: &Symbol,
    lambda: &GFrameFamily,
    theta: &GFrameFamily,
) -> Result<DualsFromInvertible> {
    let forward = assemble_multiplier(m, lambda, theta)?;
    let forward_inv = forward.direct_inverse()?;
    let swapped = assemble_multiplier(&m.conj(), theta, lambda)?;
    let swapped_inv = swapped.direct_inverse()?;

    let dual_of_theta = lambda.scale(&m.conj())?.right_compose(&swapped_inv.inverse)?;
    let dual_of_lambda = theta.scale(m)?.right_compose(&forward_inv.inverse)?;

    let theta_residual = dual_check(&dual_of_theta, theta)?.deviation;
    let lambda_residual = dual_check(lambda, &dual_of_lambda)?.deviation;
    Ok(DualsFromInvertible {
        dual_of_theta,
        dual_of_lambda,
        theta_residual,
        lambda_residual,
    })
}

/// Deviations of the right-composition identities, forward and inverted.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ComposeReport {
    /// `‖M_{m,Λ,ΛS} − M_{m,Λ,Λ} S‖`.
    pub forward_right_dev: f64,
    /// `‖M_{m,ΛS,Λ} − S* M_{m,Λ,Λ}‖`.
    pub forward_left_dev: f64,
    /// `‖M_{m,Λ,ΛS}⁻¹ − S⁻¹ M_{m,Λ,Λ}⁻¹‖`.
    pub inverse_right_dev: f64,
    /// `‖M_{m,ΛS,Λ}⁻¹ − M_{m,Λ,Λ}⁻¹ (S⁻¹)*‖`.
    pub inverse_left_dev: f64,
    /// `‖M_{m,Λ,Λ̃}⁻¹ − S_Λ M_{m,Λ,Λ}⁻¹‖` (canonical-dual case `S = S_Λ⁻¹`).
    pub canonical_right_dev: f64,
    /// `‖M_{m,Λ̃,Λ}⁻¹ − M_{m,Λ,Λ}⁻¹ S_Λ‖`.
    pub canonical_left_dev: f64,
    /// Largest operator norm among the compared forward products.
    pub forward_scale: f64,
    /// Largest operator norm among the compared inverses.
    pub inverse_scale: f64,
}

impl ComposeReport {
    pub fn forward_ok(&self, rel_tol: f64) -> bool {
        let tol = rel_tol * self.forward_scale;
        self.forward_right_dev <= tol && self.forward_left_dev <= tol
    }

    pub fn inverse_ok(&self, rel_tol: f64) -> bool {
        let tol = rel_tol * self.inverse_scale;
        self.inverse_right_dev <= tol
            && self.inverse_left_dev <= tol
            && self.canonical_right_dev <= tol
            && self.canonical_left_dev <= tol
    }
}

/// Verify the right-composition identities for `M_{m,Λ,ΛS}` and `M_{m,ΛS,Λ}`
/// together with their inverses, including the canonical-dual corollary.
///
/// The symbol must either be real positive or stay within `A_Λ/B_Λ` of one,
/// otherwise the base multiplier `M_{m,Λ,Λ}` has no invertibility guarantee
/// and the check refuses to run.
pub fn compose_identities(
    m: &Symbol,
    lambda: &GFrameFamily,
    s: &OperatorH,
) -> Result<ComposeReport> {
    let bounds = lambda.frame_bounds_default();
    if !bounds.is_frame {
        return Err(Error::NotAFrame {
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    let positive = m.is_real_positive(1e-12);
    let near_one = m.dist_to_one() < bounds.lower / bounds.upper;
    if !(positive || near_one) {
        return Err(Error::ConditionNotMet(format!(
            "symbol is neither real positive (min Re = {:.3e}) nor within A/B = {:.3e} of one (‖m−1‖∞ = {:.3e})",
            m.min_real(),
            bounds.lower / bounds.upper,
            m.dist_to_one()
        )));
    }

    let s_inv = s.direct_inverse()?.inverse;
    let base = assemble_multiplier(m, lambda, lambda)?;
    let base_inv = base.direct_inverse()?.inverse;
    let lam_s = lambda.right_compose(s)?;

    let right = assemble_multiplier(m, lambda, &lam_s)?;
    let left = assemble_multiplier(m, &lam_s, lambda)?;
    let right_expected = &base * s;
    let left_expected = &s.adjoint() * &base;
    let forward_right_dev = (&right - &right_expected).op_norm();
    let forward_left_dev = (&left - &left_expected).op_norm();
    let forward_scale = right_expected
        .op_norm()
        .max(left_expected.op_norm())
        .max(1e-300);

    let right_inv = right.direct_inverse()?.inverse;
    let left_inv = left.direct_inverse()?.inverse;
    let inverse_right_dev = (&right_inv - &(&s_inv * &base_inv)).op_norm();
    let inverse_left_dev = (&left_inv - &(&base_inv * &s_inv.adjoint())).op_norm();

    // Corollary S = S_Λ⁻¹: the composed family is the canonical dual.
    let frame_op = lambda.frame_operator();
    let dual = lambda.canonical_dual()?;
    let canon_right = assemble_multiplier(m, lambda, &dual)?;
    let canon_left = assemble_multiplier(m, &dual, lambda)?;
    let canonical_right_dev =
        (&canon_right.direct_inverse()?.inverse - &(&frame_op * &base_inv)).op_norm();
    let canonical_left_dev =
        (&canon_left.direct_inverse()?.inverse - &(&base_inv * &frame_op)).op_norm();

    let inverse_scale = right_inv
        .op_norm()
        .max(left_inv.op_norm())
        .max((&frame_op * &base_inv).op_norm())
        .max(1e-300);

    Ok(ComposeReport {
        forward_right_dev,
        forward_left_dev,
        inverse_right_dev,
        inverse_left_dev,
        canonical_right_dev,
        canonical_left_dev,
        forward_scale,
        inverse_scale,
    })
}
