//! Full-report execution: run every check a scenario supports, record each
//! asserted inequality with its numbers, and render text or JSON.
//!
//! Entries marked `Fail` are violations of proved bounds; their presence
//! drives the CLI's exit code 2. Certificates being unsatisfied, or checks
//! whose preconditions fail, are ordinary findings, not violations.

use crate::scenario::Scenario;
use crate::{HarnessError, Result};
use gfm_core::error::Error as CoreError;
use gfm_core::gframe::{estimate_nu, weakly_equal, FrameBounds};
use gfm_core::invertibility::{
    cert_combined, cert_cooor, cert_dualframes, cert_thm_main, necessary_conditions_check,
    run_certified_inversion, theta_frame_check, CertKind, Certificate,
};
use gfm_core::multiplier::{
    adjoint_check, assemble_multiplier, dual_check, duals_from_invertible, gdual_check,
};
use gfm_core::opalgebra::OperatorH;
use gfm_core::{Inequality, VALIDATION_SLACK};
use serde::Serialize;

/// Knobs for [`run_report`].
#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    /// Term cap for certified Neumann runs.
    pub n_max: usize,
    /// A-priori error target for certified Neumann runs.
    pub target_err: f64,
    /// Fault injection: scale every predicted bound by this factor before
    /// validating, to exercise the violation detector end to end.
    pub inject_bound_error: Option<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            n_max: 30,
            target_err: 1e-10,
            inject_bound_error: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// An asserted inequality that holds.
    Pass,
    /// An asserted inequality that fails: a theorem violation.
    Fail,
    /// Plain finding, no assertion attached.
    Info,
    /// Precondition not met; nothing asserted.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub label: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<Inequality>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub title: String,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub generated_at: String,
    pub generator: String,
    pub sections: Vec<Section>,
    pub violations: usize,
}

impl Report {
    pub fn has_violations(&self) -> bool {
        self.violations > 0
    }

    /// Plain-text rendering. Deterministic except for the `generated:` line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("g-frame multiplier report\n");
        out.push_str(&format!("generated: {}\n", self.generated_at));
        out.push_str(&format!("generator: {}\n", self.generator));
        for section in &self.sections {
            out.push_str(&format!("\n== {} ==\n", section.title));
            for e in &section.entries {
                let tag = match e.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Info => "info",
                    Status::NotApplicable => "n/a ",
                };
                out.push_str(&format!("  [{tag}] {}: {}\n", e.label, e.detail));
            }
        }
        out.push('\n');
        if self.has_violations() {
            out.push_str(&format!(
                "overall: {} THEOREM VIOLATION(S) DETECTED\n",
                self.violations
            ));
        } else {
            out.push_str("overall: ok, all asserted inequalities hold\n");
        }
        out
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn fmt_check(c: &Inequality) -> String {
    format!(
        "lhs={} rhs={} margin={}",
        fmt(c.lhs),
        fmt(c.rhs),
        fmt(c.margin)
    )
}

fn bounds_detail(b: &FrameBounds) -> String {
    format!(
        "A={} B={} frame={}",
        fmt(b.lower),
        fmt(b.upper),
        if b.is_frame { "yes" } else { "no" }
    )
}

struct SectionBuilder {
    section: Section,
}

impl SectionBuilder {
    fn new(title: &str) -> Self {
        SectionBuilder {
            section: Section {
                title: title.to_string(),
                entries: Vec::new(),
            },
        }
    }

    fn info(&mut self, label: &str, detail: String) {
        self.section.entries.push(Entry {
            label: label.to_string(),
            status: Status::Info,
            detail,
            check: None,
        });
    }

    fn not_applicable(&mut self, label: &str, reason: String) {
        self.section.entries.push(Entry {
            label: label.to_string(),
            status: Status::NotApplicable,
            detail: reason,
            check: None,
        });
    }

    fn assert_check(&mut self, label: &str, check: Inequality, context: &str) {
        let status = if check.holds { Status::Pass } else { Status::Fail };
        self.section.entries.push(Entry {
            label: label.to_string(),
            status,
            detail: format!("{context}: {}", fmt_check(&check)),
            check: Some(check),
        });
    }

    fn fail(&mut self, label: &str, detail: String) {
        self.section.entries.push(Entry {
            label: label.to_string(),
            status: Status::Fail,
            detail,
            check: None,
        });
    }

    fn done(self) -> Section {
        self.section
    }
}

/// Errors that mean "this check does not apply here", as opposed to bugs.
fn not_applicable_reason(e: &CoreError) -> Option<String> {
    match e {
        CoreError::NotAFrame { .. }
        | CoreError::SymbolNotPositive(_)
        | CoreError::NotDualPair { .. }
        | CoreError::ConditionNotMet(_)
        | CoreError::SingularOperator { .. } => Some(e.to_string()),
        _ => None,
    }
}

fn corrupt_prediction(cert: &Certificate, factor: f64) -> Certificate {
    let mut corrupted = cert.clone();
    if let Some(p) = corrupted.prediction.as_mut() {
        p.inv_upper *= factor;
        p.prefactor *= factor;
        p.inv_lower /= factor;
    }
    corrupted
}

/// Run every check on the scenario and collect the outcome.
pub fn run_report(scenario: &Scenario, opts: &ReportOptions) -> Result<Report> {
    let tol = scenario.tolerances;
    let lambda = &scenario.lambda;
    let theta = scenario.theta_or_lambda();
    let m = &scenario.symbol;
    let mut sections = Vec::new();

    // -- scenario summary ---------------------------------------------------
    let mut s = SectionBuilder::new("scenario");
    s.info("dim", scenario.dim.to_string());
    s.info("points", scenario.space.len().to_string());
    s.info(
        "theta",
        if scenario.theta.is_some() {
            "explicit".to_string()
        } else {
            "defaulted to lambda".to_string()
        },
    );
    s.info(
        "dual",
        if scenario.dual.is_some() {
            "present".to_string()
        } else {
            "absent".to_string()
        },
    );
    s.info(
        "symbol",
        format!(
            "sup={} dist_to_one={} min_real={} max_imag={}",
            fmt(m.sup_norm()),
            fmt(m.dist_to_one()),
            fmt(m.min_real()),
            fmt(m.max_imag_abs())
        ),
    );
    s.info(
        "tolerances",
        format!(
            "frame_tol={} dual_tol={} boundary_eps={}",
            fmt(tol.frame_tol),
            fmt(tol.dual_tol),
            fmt(tol.boundary_eps)
        ),
    );
    if let Some(f) = opts.inject_bound_error {
        s.info(
            "fault injection",
            format!("predicted bounds deliberately scaled by {}", fmt(f)),
        );
    }
    sections.push(s.done());

    // -- frame bounds -------------------------------------------------------
    let lambda_bounds = lambda.frame_bounds(tol.frame_tol);
    let theta_bounds = theta.frame_bounds(tol.frame_tol);
    let mut s = SectionBuilder::new("frame bounds");
    s.info("lambda", bounds_detail(&lambda_bounds));
    s.info("theta", bounds_detail(&theta_bounds));
    if let Some(dual) = &scenario.dual {
        s.info("dual", bounds_detail(&dual.frame_bounds(tol.frame_tol)));
    }
    sections.push(s.done());

    // -- perturbation -------------------------------------------------------
    let mut s = SectionBuilder::new("perturbation");
    let nu_estimate = estimate_nu(lambda, theta)?;
    s.info("nu estimate", fmt(nu_estimate));
    if let Some(nu) = scenario.nu_override {
        s.info("nu override", fmt(nu));
    }
    s.info(
        "weakly equal (tol 1e-7)",
        weakly_equal(lambda, theta, 1e-7)?.to_string(),
    );
    match theta_frame_check(lambda, theta, scenario.nu_override, &tol) {
        Ok(report) => {
            if report.condition_met {
                let check = report.deviation_check.expect("present when condition met");
                s.assert_check(
                    "perturbation deviation",
                    check,
                    &format!("‖I − M_1(dual(Λ),Θ)‖ vs √(ν/A) with ν={}", fmt(report.nu)),
                );
                let tb = report.theta_bounds.expect("present when condition met");
                let positive = Inequality {
                    lhs: tb.lower,
                    rhs: 0.0,
                    margin: tb.lower,
                    slack: 0.0,
                    holds: tb.lower > 0.0,
                };
                s.assert_check(
                    "theta lower bound positive",
                    positive,
                    &format!("A_Θ={} must be > 0", fmt(tb.lower)),
                );
            } else {
                s.not_applicable(
                    "perturbation frame test",
                    format!(
                        "ν={} is not below A_Λ={}",
                        fmt(report.nu),
                        fmt(report.frame_lower)
                    ),
                );
            }
        }
        Err(e) => match not_applicable_reason(&e) {
            Some(reason) => s.not_applicable("perturbation frame test", reason),
            None => return Err(e.into()),
        },
    }
    sections.push(s.done());

    // -- multiplier algebra ---------------------------------------------------
    let multiplier = assemble_multiplier(m, lambda, theta)?;
    let m_norm = multiplier.op_norm();
    let mut s = SectionBuilder::new("multiplier");
    s.info("‖M‖", fmt(m_norm));
    let norm_bound =
        m.sup_norm() * (lambda_bounds.upper * theta_bounds.upper).sqrt();
    s.assert_check(
        "norm bound",
        Inequality::le(m_norm, norm_bound, VALIDATION_SLACK),
        "‖M‖ vs ‖m‖∞·√(B_Λ·B_Θ)",
    );
    let identity_tol = 1e-12 * m_norm.max(f64::MIN_POSITIVE);
    s.assert_check(
        "adjoint identity",
        Inequality::le(adjoint_check(m, lambda, theta)?, identity_tol, 0.0),
        "‖M* − M(conj m, Θ, Λ)‖ vs 1e-12·‖M‖",
    );
    s.assert_check(
        "rewrite identities",
        Inequality::le(
            gfm_core::multiplier::rewrite_check(m, lambda, theta)?,
            identity_tol,
            0.0,
        ),
        "max deviation among symbol rewritings vs 1e-12·‖M‖",
    );
    sections.push(s.done());

    // -- direct inversion -----------------------------------------------------
    let mut s = SectionBuilder::new("direct inversion");
    let direct = match multiplier.direct_inverse() {
        Ok(inv) => {
            s.info("invertible", "yes".to_string());
            s.info("cond", fmt(inv.cond));
            s.info("‖M⁻¹‖", fmt(inv.inverse.op_norm()));
            s.info("1/‖M‖", fmt(1.0 / m_norm));
            Some(inv)
        }
        Err(CoreError::SingularOperator { sigma_min, threshold }) => {
            s.info(
                "invertible",
                format!("no (σ_min={} below {})", fmt(sigma_min), fmt(threshold)),
            );
            None
        }
        Err(e) => return Err(e.into()),
    };
    sections.push(s.done());

    // -- certificates ---------------------------------------------------------
    let mut s = SectionBuilder::new("certificates");
    let mut satisfied: Vec<(Certificate, OperatorH)> = Vec::new();
    for kind in CertKind::ALL {
        let built: std::result::Result<(Certificate, OperatorH), CoreError> = match kind {
            CertKind::PositiveSymbol => {
                cert_thm_main(lambda, theta, m, scenario.nu_override, &tol)
                    .map(|c| (c, multiplier.clone()))
            }
            CertKind::NearOne => cert_cooor(lambda, m, &tol)
                .and_then(|c| Ok((c, assemble_multiplier(m, lambda, lambda)?))),
            CertKind::Combined => cert_combined(lambda, theta, m, scenario.nu_override, &tol)
                .map(|c| (c, multiplier.clone())),
            CertKind::DualPair => match &scenario.dual {
                None => Err(CoreError::NotDualPair {
                    deviation: f64::INFINITY,
                    tolerance: tol.dual_tol,
                }),
                Some(dual) => cert_dualframes(lambda, dual, m, &tol)
                    .and_then(|c| Ok((c, assemble_multiplier(m, lambda, dual)?))),
            },
        };
        match built {
            Ok((cert, target)) => {
                let mut detail = format!(
                    "satisfied={} lhs={} rhs={} margin={}",
                    if cert.satisfied { "yes" } else { "no" },
                    fmt(cert.condition_lhs),
                    fmt(cert.condition_rhs),
                    fmt(cert.margin)
                );
                if cert.borderline {
                    detail.push_str(" (borderline)");
                }
                if let Some(p) = &cert.prediction {
                    detail.push_str(&format!(
                        " inv_lower={} inv_upper={} ratio={} prefactor={}",
                        fmt(p.inv_lower),
                        fmt(p.inv_upper),
                        fmt(p.ratio),
                        fmt(p.prefactor)
                    ));
                }
                s.info(kind.id(), detail);
                if cert.satisfied {
                    satisfied.push((cert, target));
                }
            }
            Err(e) => match not_applicable_reason(&e) {
                Some(reason) => {
                    let reason = if kind == CertKind::DualPair && scenario.dual.is_none() {
                        "no dual family in scenario".to_string()
                    } else {
                        reason
                    };
                    s.not_applicable(kind.id(), reason);
                }
                None => return Err(e.into()),
            },
        }
    }
    sections.push(s.done());

    // -- certified inversion ----------------------------------------------------
    let mut s = SectionBuilder::new("certified inversion");
    if satisfied.is_empty() {
        s.not_applicable("neumann", "no satisfied certificate".to_string());
    }
    for (cert, target) in &satisfied {
        let label = cert.kind.id();
        let effective = match opts.inject_bound_error {
            Some(factor) => corrupt_prediction(cert, factor),
            None => cert.clone(),
        };
        match run_certified_inversion(&effective, target, opts.n_max, opts.target_err) {
            Ok(run) => {
                s.info(
                    &format!("{label} series"),
                    format!(
                        "terms={} q={} a_priori={} residual={} oracle_gap={}",
                        run.result.terms_used,
                        fmt(run.result.contraction),
                        fmt(run.result.a_priori_bound),
                        fmt(run.result.a_posteriori_residual),
                        run.result
                            .oracle_gap
                            .map(fmt)
                            .unwrap_or_else(|| "unavailable".to_string()),
                    ),
                );
                s.assert_check(
                    &format!("{label} truncation bounds"),
                    run.worst_gap_check,
                    "worst gap_n vs r^{n+1}·c over all partial sums",
                );
                s.assert_check(
                    &format!("{label} lower bound"),
                    run.lower_check,
                    "1/‖M‖ vs predicted inv_lower",
                );
                s.assert_check(
                    &format!("{label} upper bound"),
                    run.upper_check,
                    "‖M⁻¹‖ vs predicted inv_upper",
                );
            }
            Err(CoreError::TheoremViolation(detail)) => {
                s.fail(&format!("{label} validation"), detail);
            }
            Err(e) => return Err(e.into()),
        }
    }
    sections.push(s.done());

    // -- necessary conditions -----------------------------------------------
    let mut s = SectionBuilder::new("necessary conditions");
    let necessary = necessary_conditions_check(m, lambda, theta, &tol)?;
    if necessary.applicable {
        s.info(
            "γ = ‖M⁻¹‖",
            fmt(necessary.inv_norm.expect("applicable")),
        );
        for named in &necessary.checks {
            s.assert_check(
                &named.name,
                named.check,
                "λ_min vs forced lower frame bound",
            );
        }
    } else {
        s.not_applicable(
            "necessary conditions",
            "M is numerically singular".to_string(),
        );
    }
    sections.push(s.done());

    // -- duality --------------------------------------------------------------
    let mut s = SectionBuilder::new("duality");
    let pair = dual_check(lambda, theta)?;
    s.info(
        "dual check (Λ, Θ)",
        format!("deviation={} dual={}", fmt(pair.deviation), pair.is_dual),
    );
    if let Some(dual) = &scenario.dual {
        let pair = dual_check(lambda, dual)?;
        s.info(
            "dual check (Λ, Λd)",
            format!("deviation={} dual={}", fmt(pair.deviation), pair.is_dual),
        );
    }
    let gd = gdual_check(lambda, theta)?;
    if gd.is_gdual {
        s.info(
            "g-dual",
            format!("S_ΛΘ invertible, cond={}", fmt(gd.cond.expect("invertible"))),
        );
        s.assert_check(
            "g-dual residual",
            Inequality::le(gd.residual.expect("invertible"), tol.dual_tol, 0.0),
            "dual residual of Λ·S_ΘΛ⁻¹ against Θ",
        );
    } else {
        s.info("g-dual", "S_ΛΘ numerically singular".to_string());
    }
    if direct.is_some() {
        match duals_from_invertible(m, lambda, theta) {
            Ok(duals) => {
                s.assert_check(
                    "dual-of-theta residual",
                    Inequality::le(duals.theta_residual, tol.dual_tol, 0.0),
                    "conj(m)Λ·M(conj m,Θ,Λ)⁻¹ against Θ",
                );
                s.assert_check(
                    "dual-of-lambda residual",
                    Inequality::le(duals.lambda_residual, tol.dual_tol, 0.0),
                    "mΘ·M(m,Λ,Θ)⁻¹ against Λ",
                );
            }
            Err(e) => match not_applicable_reason(&e) {
                Some(reason) => s.not_applicable("duals from invertible multiplier", reason),
                None => return Err(e.into()),
            },
        }
    } else {
        s.not_applicable(
            "duals from invertible multiplier",
            "M is numerically singular".to_string(),
        );
    }
    sections.push(s.done());

    let violations = sections
        .iter()
        .flat_map(|sec| sec.entries.iter())
        .filter(|e| e.status == Status::Fail)
        .count();
    Ok(Report {
        generated_at: chrono::Utc::now().to_rfc3339(),
        generator: scenario
            .generator
            .clone()
            .unwrap_or_else(|| "none".to_string()),
        sections,
        violations,
    })
}

/// Convenience used by tests and the CLI for machine consumption.
pub fn report_json(report: &Report) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| HarnessError::Validation(e.to_string()))
}
