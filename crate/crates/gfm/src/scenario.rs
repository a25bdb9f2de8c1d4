//! Scenario files: the JSON schema, validation into domain types, and the
//! reverse mapping for saving.
//!
//! Complex numbers are two-element arrays `[re, im]`; matrices are arrays of
//! row arrays; a family is one matrix per point. `theta` defaults to the
//! lambda family when absent.

use crate::{HarnessError, Result};
use gfm_core::gframe::{DiscreteMeasureSpace, GFrameFamily};
use gfm_core::multiplier::Symbol;
use gfm_core::{CMatrix, Cx, Tolerances};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

type CxRepr = [f64; 2];
type MatrixRepr = Vec<Vec<CxRepr>>;

/// On-disk scenario schema. Field names are part of the file contract.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub lambda: Vec<MatrixRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<MatrixRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<MatrixRepr>>,
    pub symbol: Vec<CxRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
    /// Identifier of the generator that produced the file, when any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

/// Partial tolerance overrides; unset fields keep the defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_eps: Option<f64>,
}

impl ToleranceOverrides {
    pub fn resolve(&self) -> Result<Tolerances> {
        let base = Tolerances::default();
        let pick = |name: &str, v: Option<f64>, dflt: f64| -> Result<f64> {
            match v {
                None => Ok(dflt),
                Some(x) if x.is_finite() && x >= 0.0 => Ok(x),
                Some(x) => Err(HarnessError::Validation(format!(
                    "tolerance {name} must be a nonnegative finite number, got {x}"
                ))),
            }
        };
        Ok(Tolerances {
            frame_tol: pick("frame_tol", self.frame_tol, base.frame_tol)?,
            dual_tol: pick("dual_tol", self.dual_tol, base.dual_tol)?,
            boundary_eps: pick("boundary_eps", self.boundary_eps, base.boundary_eps)?,
        })
    }
}

/// A validated scenario: families share one measure space and all structural
/// invariants have been checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub dim: usize,
    pub space: Arc<DiscreteMeasureSpace>,
    pub lambda: GFrameFamily,
    pub theta: Option<GFrameFamily>,
    pub dual: Option<GFrameFamily>,
    pub symbol: Symbol,
    pub nu_override: Option<f64>,
    pub tolerances: Tolerances,
    pub generator: Option<String>,
}

impl Scenario {
    /// The second family of the multiplier; Θ defaults to Λ.
    pub fn theta_or_lambda(&self) -> &GFrameFamily {
        self.theta.as_ref().unwrap_or(&self.lambda)
    }

    pub fn from_file_struct(file: ScenarioFile) -> Result<Scenario> {
        let space = Arc::new(DiscreteMeasureSpace::new(file.weights.clone())?);
        let n = space.len();
        let lambda = family_from_repr("lambda", &file.lambda, &space, file.dim)?;
        let theta = file
            .theta
            .as_ref()
            .map(|t| family_from_repr("theta", t, &space, file.dim))
            .transpose()?;
        let dual = file
            .dual
            .as_ref()
            .map(|d| family_from_repr("dual", d, &space, file.dim))
            .transpose()?;
        if file.symbol.len() != n {
            return Err(HarnessError::Validation(format!(
                "symbol has {} values but the space has {} points",
                file.symbol.len(),
                n
            )));
        }
        let symbol = Symbol::new(file.symbol.iter().map(|&[re, im]| Cx::new(re, im)).collect())?;
        if let Some(t) = &theta {
            gfm_core::gframe::check_same_structure(&lambda, t)?;
        }
        if let Some(d) = &dual {
            gfm_core::gframe::check_same_structure(&lambda, d)?;
        }
        if let Some(nu) = file.nu_override {
            if !(nu.is_finite() && nu >= 0.0) {
                return Err(HarnessError::Validation(format!(
                    "nu_override must be a nonnegative finite number, got {nu}"
                )));
            }
        }
        let tolerances = file.tolerances.unwrap_or_default().resolve()?;
        Ok(Scenario {
            dim: file.dim,
            space,
            lambda,
            theta,
            dual,
            symbol,
            nu_override: file.nu_override,
            tolerances,
            generator: file.generator,
        })
    }

    pub fn to_file_struct(&self) -> ScenarioFile {
        let defaults = Tolerances::default();
        let tolerances = if self.tolerances == defaults {
            None
        } else {
            Some(ToleranceOverrides {
                frame_tol: Some(self.tolerances.frame_tol),
                dual_tol: Some(self.tolerances.dual_tol),
                boundary_eps: Some(self.tolerances.boundary_eps),
            })
        };
        ScenarioFile {
            dim: self.dim,
            weights: self.space.weights().to_vec(),
            lambda: family_to_repr(&self.lambda),
            theta: self.theta.as_ref().map(family_to_repr),
            dual: self.dual.as_ref().map(family_to_repr),
            symbol: self.symbol.values().iter().map(|z| [z.re, z.im]).collect(),
            nu_override: self.nu_override,
            tolerances,
            generator: self.generator.clone(),
        }
    }
}

fn family_from_repr(
    name: &str,
    repr: &[MatrixRepr],
    space: &Arc<DiscreteMeasureSpace>,
    dim: usize,
) -> Result<GFrameFamily> {
    if repr.len() != space.len() {
        return Err(HarnessError::Validation(format!(
            "family '{name}' has {} blocks but the space has {} points",
            repr.len(),
            space.len()
        )));
    }
    let mut blocks = Vec::with_capacity(repr.len());
    for (i, rows) in repr.iter().enumerate() {
        if rows.is_empty() {
            return Err(HarnessError::Validation(format!(
                "family '{name}', block {i}: no rows"
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(HarnessError::Validation(format!(
                    "family '{name}', block {i}, row {r}: {} columns, expected dim = {dim}",
                    row.len()
                )));
            }
        }
        let mat = CMatrix::from_fn(rows.len(), dim, |r, c| {
            Cx::new(rows[r][c][0], rows[r][c][1])
        });
        blocks.push(mat);
    }
    GFrameFamily::new(Arc::clone(space), dim, blocks).map_err(HarnessError::from)
}

fn family_to_repr(fam: &GFrameFamily) -> Vec<MatrixRepr> {
    fam.blocks()
        .iter()
        .map(|b| {
            (0..b.nrows())
                .map(|r| {
                    (0..b.ncols())
                        .map(|c| {
                            let z = b[(r, c)];
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Format {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| HarnessError::Format {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    Scenario::from_file_struct(file)
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<()> {
    let file = scenario.to_file_struct();
    let text = serde_json::to_string_pretty(&file).map_err(|e| HarnessError::Format {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Parameter swept by [`crate::sweep::run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Rescale the symbol's deviation from one so `‖m−1‖∞` equals the value.
    LambdaShift,
    /// Rescale Θ−Λ so the perturbation level ν equals the value.
    NuScale,
    /// Multiply the whole symbol by the value.
    SymbolScale,
}

impl SweepParam {
    pub fn id(&self) -> &'static str {
        match self {
            SweepParam::LambdaShift => "lambda_shift",
            SweepParam::NuScale => "nu_scale",
            SweepParam::SymbolScale => "symbol_scale",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda_shift" => Ok(SweepParam::LambdaShift),
            "nu_scale" => Ok(SweepParam::NuScale),
            "symbol_scale" => Ok(SweepParam::SymbolScale),
            other => Err(HarnessError::Validation(format!(
                "unknown sweep parameter '{other}' (expected lambda_shift, nu_scale or symbol_scale)"
            ))),
        }
    }
}

/// Validated sweep request over a base scenario.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, from: f64, to: f64, steps: usize) -> Result<Self> {
        if !(from.is_finite() && to.is_finite() && from < to) {
            return Err(HarnessError::Validation(format!(
                "sweep range must satisfy from < to, got [{from}, {to}]"
            )));
        }
        if !(2..=10_000).contains(&steps) {
            return Err(HarnessError::Validation(format!(
                "steps must be between 2 and 10000, got {steps}"
            )));
        }
        Ok(SweepSpec {
            param,
            from,
            to,
            steps,
        })
    }

    pub fn value_at(&self, step: usize) -> f64 {
        self.from + (self.to - self.from) * step as f64 / (self.steps - 1) as f64
    }
}
