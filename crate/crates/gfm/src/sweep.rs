//! Parameter sweeps: re-evaluate the certificates and the actual inverse
//! along one axis (symbol deviation, perturbation level, or symbol scale)
//! and emit a fixed-header CSV.
//!
//! Steps are independent and run on a rayon pool; `GFM_THREADS` caps the
//! pool size. Rows come back in step order regardless of scheduling.

use crate::scenario::{Scenario, SweepParam, SweepSpec};
use crate::{HarnessError, Result};
use gfm_core::gframe::{estimate_nu, GFrameFamily};
use gfm_core::invertibility::{
    cert_combined, cert_cooor, cert_dualframes, cert_thm_main, CertKind, Certificate,
};
use gfm_core::multiplier::{assemble_multiplier, Symbol};
use gfm_core::Cx;
use rayon::prelude::*;
use std::sync::Arc;

/// One certificate's outcome at one sweep step.
#[derive(Debug, Clone, Copy)]
pub struct CertCell {
    pub applicable: bool,
    pub satisfied: bool,
    pub margin: f64,
    pub inv_lower: Option<f64>,
    pub inv_upper: Option<f64>,
}

/// One sweep step: parameter value, certificate outcomes, and the measured
/// behaviour of the main multiplier `M_{m,Λ,Θ}`.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub step: usize,
    pub value: f64,
    /// In [`CertKind::ALL`] order.
    pub certs: Vec<CertCell>,
    pub invertible: bool,
    pub cond: Option<f64>,
    pub inv_norm: Option<f64>,
    pub min_gain: f64,
}

fn cert_cell(built: std::result::Result<Certificate, gfm_core::Error>) -> Result<CertCell> {
    use gfm_core::Error as E;
    match built {
        Ok(cert) => Ok(CertCell {
            applicable: true,
            satisfied: cert.satisfied,
            margin: cert.margin,
            inv_lower: cert.prediction.map(|p| p.inv_lower),
            inv_upper: cert.prediction.map(|p| p.inv_upper),
        }),
        Err(
            E::NotAFrame { .. }
            | E::SymbolNotPositive(_)
            | E::NotDualPair { .. }
            | E::ConditionNotMet(_),
        ) => Ok(CertCell {
            applicable: false,
            satisfied: false,
            margin: f64::NAN,
            inv_lower: None,
            inv_upper: None,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Apply a sweep parameter value to the base scenario's symbol/theta.
fn apply_step(
    base: &Scenario,
    param: SweepParam,
    value: f64,
    base_nu: f64,
) -> Result<(Symbol, GFrameFamily)> {
    let theta = base.theta_or_lambda();
    match param {
        SweepParam::LambdaShift => {
            let dist = base.symbol.dist_to_one();
            let values = if dist > 0.0 {
                base.symbol
                    .values()
                    .iter()
                    .map(|z| {
                        let dev = z - Cx::new(1.0, 0.0);
                        Cx::new(1.0, 0.0) + dev * Cx::new(value / dist, 0.0)
                    })
                    .collect()
            } else {
                // Flat base symbol: alternate ±value around one.
                (0..base.symbol.len())
                    .map(|i| Cx::new(1.0 + if i % 2 == 0 { value } else { -value }, 0.0))
                    .collect()
            };
            Ok((Symbol::new(values)?, theta.clone()))
        }
        SweepParam::NuScale => {
            if value == 0.0 {
                return Ok((base.symbol.clone(), base.lambda.clone()));
            }
            if base_nu <= 0.0 {
                return Err(HarnessError::Validation(
                    "nu_scale sweep needs a base scenario with Θ ≠ Λ".into(),
                ));
            }
            let t = Cx::new((value / base_nu).sqrt(), 0.0);
            let blocks = base
                .lambda
                .blocks()
                .iter()
                .zip(theta.blocks())
                .map(|(l, th)| l + (th - l).map(|z| z * t))
                .collect();
            let scaled = GFrameFamily::new(
                Arc::clone(base.lambda.space()),
                base.lambda.ambient_dim(),
                blocks,
            )?;
            Ok((base.symbol.clone(), scaled))
        }
        SweepParam::SymbolScale => {
            let values = base
                .symbol
                .values()
                .iter()
                .map(|z| z * Cx::new(value, 0.0))
                .collect();
            Ok((Symbol::new(values)?, theta.clone()))
        }
    }
}

fn evaluate_step(base: &Scenario, spec: &SweepSpec, step: usize, base_nu: f64) -> Result<SweepRow> {
    let value = spec.value_at(step);
    let (symbol, theta) = apply_step(base, spec.param, value, base_nu)?;
    let tol = base.tolerances;
    let lambda = &base.lambda;

    let mut certs = Vec::with_capacity(CertKind::ALL.len());
    for kind in CertKind::ALL {
        let built = match kind {
            CertKind::PositiveSymbol => {
                cert_thm_main(lambda, &theta, &symbol, base.nu_override, &tol)
            }
            CertKind::NearOne => cert_cooor(lambda, &symbol, &tol),
            CertKind::Combined => {
                cert_combined(lambda, &theta, &symbol, base.nu_override, &tol)
            }
            CertKind::DualPair => match &base.dual {
                None => Err(gfm_core::Error::NotDualPair {
                    deviation: f64::INFINITY,
                    tolerance: tol.dual_tol,
                }),
                Some(dual) => cert_dualframes(lambda, dual, &symbol, &tol),
            },
        };
        certs.push(cert_cell(built)?);
    }

    let multiplier = assemble_multiplier(&symbol, lambda, &theta)?;
    let min_gain = 1.0 / multiplier.op_norm();
    let row = match multiplier.direct_inverse() {
        Ok(inv) => SweepRow {
            step,
            value,
            certs,
            invertible: true,
            cond: Some(inv.cond),
            inv_norm: Some(inv.inverse.op_norm()),
            min_gain,
        },
        Err(gfm_core::Error::SingularOperator { .. }) => SweepRow {
            step,
            value,
            certs,
            invertible: false,
            cond: None,
            inv_norm: None,
            min_gain,
        },
        Err(e) => return Err(e.into()),
    };
    Ok(row)
}

/// Execute the sweep. The base scenario is never mutated.
pub fn run_sweep(base: &Scenario, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let base_nu = estimate_nu(&base.lambda, base.theta_or_lambda())?;
    if spec.param == SweepParam::NuScale && base_nu <= 0.0 && spec.to > 0.0 {
        return Err(HarnessError::Validation(
            "nu_scale sweep needs a base scenario with Θ ≠ Λ".into(),
        ));
    }

    let pool = match std::env::var("GFM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Validation(e.to_string()))?,
        _ => rayon::ThreadPoolBuilder::new()
            .build()
            .map_err(|e| HarnessError::Validation(e.to_string()))?,
    };
    pool.install(|| {
        (0..spec.steps)
            .into_par_iter()
            .map(|step| evaluate_step(base, spec, step, base_nu))
            .collect::<Result<Vec<_>>>()
    })
}

fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

/// Fixed-header CSV rendering of sweep rows.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("step,value");
    for kind in CertKind::ALL {
        let id = kind.id();
        out.push_str(&format!(
            ",{id}_satisfied,{id}_margin,{id}_inv_lower,{id}_inv_upper"
        ));
    }
    out.push_str(",invertible,cond,inv_norm,min_gain\n");
    for row in rows {
        out.push_str(&format!("{},{}", row.step, fmt(row.value)));
        for cell in &row.certs {
            if cell.applicable {
                out.push_str(&format!(
                    ",{},{},{},{}",
                    cell.satisfied,
                    fmt(cell.margin),
                    cell.inv_lower.map(fmt).unwrap_or_default(),
                    cell.inv_upper.map(fmt).unwrap_or_default()
                ));
            } else {
                out.push_str(",na,,,");
            }
        }
        out.push_str(&format!(
            ",{},{},{},{}\n",
            row.invertible,
            row.cond.map(fmt).unwrap_or_default(),
            row.inv_norm.map(fmt).unwrap_or_default(),
            fmt(row.min_gain)
        ));
    }
    out
}
