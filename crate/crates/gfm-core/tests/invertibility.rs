//! Certificates and Neumann inversion on seeded random instances built to
//! satisfy (or deliberately fail) each sufficient condition.

mod common;

use common::*;
use gfm_core::invertibility::{
    cert_combined, cert_cooor, cert_dualframes, cert_thm_main, necessary_conditions_check,
    neumann_invert, run_certified_inversion, theta_frame_check,
};
use gfm_core::multiplier::{assemble_multiplier, Symbol};
use gfm_core::opalgebra::OperatorH;
use gfm_core::{CMatrix, Cx, Error, Tolerances};
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn neumann_gap_stays_under_a_priori_bound_at_half_contraction() {
    for seed in 0..10 {
        let mut r = rng(500 + seed);
        let d = r.random_range(2..=8);
        let anchor = OperatorH::from_matrix(
            random_matrix(&mut r, d, d) + CMatrix::identity(d, d) * Cx::new(4.0, 0.0),
        )
        .unwrap();
        let anchor_inv_norm = anchor.direct_inverse().unwrap().inverse.op_norm();
        let direction = random_matrix(&mut r, d, d);
        let dir_norm = gfm_core::opalgebra::spectral_norm(&direction);
        // Scale the perturbation so q = ‖P⁻¹‖·‖P−M‖ = 0.5 exactly.
        let t = 0.5 / (anchor_inv_norm * dir_norm);
        let target = OperatorH::from_matrix(
            anchor.matrix() - direction.map(|z| z * Cx::new(t, 0.0)),
        )
        .unwrap();
        let result = neumann_invert(&target, &anchor, 30, 0.0).unwrap();
        assert!((result.contraction - 0.5).abs() <= 1e-12);
        for (n, &gap) in result.partial_gaps.iter().enumerate() {
            let bound = result.anchor_inverse_norm * result.contraction.powi(n as i32 + 1)
                / (1.0 - result.contraction);
            assert!(gap <= bound + 1e-12, "seed {seed}, n={n}: {gap} > {bound}");
        }
    }
}

#[test]
fn thm_main_certified_inversion_on_satisfied_instances() {
    for seed in 0..12 {
        let (lambda, mut r) = frame_instance(seed);
        let bounds = lambda.frame_bounds_default();
        let m = symbol_positive(&mut r, lambda.len(), 0.5, 2.0);
        let (delta, sup) = (m.min_real(), m.sup_norm());
        // Half the admissible perturbation budget: 50% margin.
        let nu_target =
            (0.5 * delta * bounds.lower / (sup * bounds.upper.sqrt())).powi(2);
        let theta = perturb_family(&mut r, &lambda, nu_target);
        let cert = cert_thm_main(&lambda, &theta, &m, None, &tol()).unwrap();
        assert!(cert.satisfied, "seed {seed}: margin {}", cert.margin);
        let target = assemble_multiplier(&m, &lambda, &theta).unwrap();
        let run = run_certified_inversion(&cert, &target, 30, 0.0).unwrap();
        assert!(run.lower_check.holds && run.upper_check.holds);
        assert!(run.worst_gap_check.holds);
    }
}

#[test]
fn cooor_certified_inversion_on_satisfied_instances() {
    for seed in 0..12 {
        let (lambda, mut r) = frame_instance(seed);
        let bounds = lambda.frame_bounds_default();
        let m = symbol_near_one(&mut r, lambda.len(), 0.5 * bounds.lower / bounds.upper);
        let cert = cert_cooor(&lambda, &m, &tol()).unwrap();
        assert!(cert.satisfied, "seed {seed}");
        let target = assemble_multiplier(&m, &lambda, &lambda).unwrap();
        let run = run_certified_inversion(&cert, &target, 30, 0.0).unwrap();
        assert!(run.lower_check.holds && run.upper_check.holds);
    }
}

#[test]
fn combined_certified_inversion_on_satisfied_instances() {
    for seed in 0..12 {
        let (lambda, mut r) = frame_instance(seed);
        let bounds = lambda.frame_bounds_default();
        let nu_target = 0.25 * bounds.lower.powi(2) / bounds.upper;
        let theta = perturb_family(&mut r, &lambda, nu_target);
        let nu = gfm_core::gframe::estimate_nu(&lambda, &theta).unwrap();
        let root = (nu * bounds.upper).sqrt();
        let rhs = (bounds.lower - root) / (bounds.upper + root);
        let m = symbol_near_one(&mut r, lambda.len(), 0.5 * rhs);
        let cert = cert_combined(&lambda, &theta, &m, None, &tol()).unwrap();
        assert!(cert.satisfied, "seed {seed}: margin {}", cert.margin);
        let target = assemble_multiplier(&m, &lambda, &theta).unwrap();
        let run = run_certified_inversion(&cert, &target, 30, 0.0).unwrap();
        assert!(run.lower_check.holds && run.upper_check.holds);
    }
}

#[test]
fn dualframes_certified_inversion_on_satisfied_instances() {
    for seed in 0..12 {
        let (lambda, mut r) = frame_instance(seed);
        let dual = lambda.canonical_dual().unwrap();
        let prod = (lambda.frame_bounds_default().upper * dual.frame_bounds_default().upper)
            .sqrt();
        let m = symbol_near_one(&mut r, lambda.len(), 0.5 / prod);
        let cert = cert_dualframes(&lambda, &dual, &m, &tol()).unwrap();
        assert!(cert.satisfied, "seed {seed}");
        let target = assemble_multiplier(&m, &lambda, &dual).unwrap();
        let run = run_certified_inversion(&cert, &target, 30, 0.0).unwrap();
        assert!(run.lower_check.holds && run.upper_check.holds);
    }
}

#[test]
fn thm_main_zero_nu_brackets_weighted_frame_operator_inverse() {
    // With Θ = Λ the multiplier is the symbol-weighted frame operator and
    // the predicted interval is [1/(‖m‖∞ B), 1/(δ A)].
    for seed in 0..12 {
        let (lambda, mut r) = frame_instance(seed);
        let m = symbol_positive(&mut r, lambda.len(), 0.3, 1.8);
        let cert = cert_thm_main(&lambda, &lambda, &m, None, &tol()).unwrap();
        assert!(cert.satisfied);
        let p = cert.prediction.unwrap();
        let bounds = lambda.frame_bounds_default();
        assert!((p.inv_lower - 1.0 / (m.sup_norm() * bounds.upper)).abs() <= 1e-12);
        assert!((p.inv_upper - 1.0 / (m.min_real() * bounds.lower)).abs() <= 1e-12);
        let target = assemble_multiplier(&m, &lambda, &lambda).unwrap();
        let inv_norm = target.direct_inverse().unwrap().inverse.op_norm();
        let min_gain = 1.0 / target.op_norm();
        assert!(p.inv_lower <= min_gain + 1e-10);
        assert!(inv_norm <= p.inv_upper + 1e-10);
    }
}

#[test]
fn increasing_nu_override_never_rescues_a_certificate() {
    for seed in 0..8 {
        let (lambda, mut r) = frame_instance(seed);
        let bounds = lambda.frame_bounds_default();
        let m = symbol_positive(&mut r, lambda.len(), 0.6, 1.4);
        let theta = perturb_family(&mut r, &lambda, 0.01 * bounds.lower.powi(2) / bounds.upper);
        let nu0 = gfm_core::gframe::estimate_nu(&lambda, &theta).unwrap();
        let top = 2.0 * bounds.lower.powi(2) / bounds.upper;
        let mut last_main = true;
        let mut last_combined = true;
        for step in 0..12 {
            let nu = nu0 + (top - nu0) * step as f64 / 11.0;
            let main = cert_thm_main(&lambda, &theta, &m, Some(nu), &tol())
                .unwrap()
                .satisfied;
            let comb = cert_combined(&lambda, &theta, &m, Some(nu), &tol())
                .unwrap()
                .satisfied;
            assert!(!(main && !last_main), "thm_main flipped false→true at ν={nu}");
            assert!(!(comb && !last_combined), "combined flipped false→true at ν={nu}");
            last_main = main;
            last_combined = comb;
        }
        assert!(!last_main && !last_combined);
    }
}

#[test]
fn borderline_symbol_is_not_satisfied() {
    let (lambda, _) = frame_instance(17);
    let bounds = lambda.frame_bounds_default();
    let ratio = bounds.lower / bounds.upper;
    let mut values = vec![Cx::new(1.0, 0.0); lambda.len()];
    values[0] = Cx::new(1.0 + ratio, 0.0);
    let m = Symbol::new(values).unwrap();
    let cert = cert_cooor(&lambda, &m, &tol()).unwrap();
    assert!(!cert.satisfied);
    assert!(cert.borderline, "margin {} should be borderline", cert.margin);
}

#[test]
fn certificates_require_a_frame() {
    let mut r = rng(9);
    // Rank-deficient: one redundant direction in a 3-dim space.
    let space = std::sync::Arc::new(
        gfm_core::gframe::DiscreteMeasureSpace::uniform(2).unwrap(),
    );
    let row = random_matrix(&mut r, 1, 3);
    let fam = gfm_core::gframe::GFrameFamily::new(
        space,
        3,
        vec![row.clone(), row.map(|z| z * Cx::new(2.0, 0.0))],
    )
    .unwrap();
    assert!(matches!(
        cert_cooor(&fam, &Symbol::ones(2), &tol()),
        Err(Error::NotAFrame { .. })
    ));
    assert!(matches!(
        cert_thm_main(&fam, &fam, &Symbol::ones(2), None, &tol()),
        Err(Error::NotAFrame { .. })
    ));
}

#[test]
fn necessary_conditions_hold_even_when_all_certificates_fail() {
    let mut checked = 0;
    for seed in 0..20 {
        let (lambda, mut r) = frame_instance(seed);
        // Wild symbol: certificates fail, the multiplier usually stays
        // invertible.
        let m = random_complex_symbol(&mut r, lambda.len(), 3.0);
        let theta_blocks = lambda
            .block_dims()
            .iter()
            .map(|&k| random_matrix(&mut r, k, lambda.ambient_dim()))
            .collect();
        let theta = gfm_core::gframe::GFrameFamily::new(
            std::sync::Arc::clone(lambda.space()),
            lambda.ambient_dim(),
            theta_blocks,
        )
        .unwrap();
        let report = necessary_conditions_check(&m, &lambda, &theta, &tol()).unwrap();
        if report.applicable {
            checked += 1;
            assert!(report.all_hold(), "seed {seed}: {:#?}", report.checks);
        }
    }
    assert!(checked >= 10, "too few invertible instances: {checked}");
}

#[test]
fn perturbation_promotes_theta_to_frame() {
    for seed in 0..15 {
        let (lambda, mut r) = frame_instance(seed);
        let a = lambda.frame_bounds_default().lower;
        let nu_target = r.random_range(0.1..0.8) * a;
        let theta = perturb_family(&mut r, &lambda, nu_target);
        let report = theta_frame_check(&lambda, &theta, None, &tol()).unwrap();
        assert!(report.condition_met, "seed {seed}: ν {} vs A {a}", report.nu);
        assert!(report.holds(), "seed {seed}: {report:?}");
        assert!(report.theta_bounds.unwrap().lower > 0.0);
    }
}
