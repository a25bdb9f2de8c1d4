//! Seeded random scenario generation with controlled targets.
//!
//! Families are shaped spectrally: a random family is first normalized to a
//! Parseval one, then right-composed with a Hermitian factor whose spectrum
//! runs linearly from the requested ratio to one, so the achieved `A/B`
//! equals the target up to rounding. Perturbations are a random direction
//! family rescaled so the measured ν hits its target. All randomness comes
//! from one named generator (`chacha8`) seeded by the caller, which makes
//! scenarios reproducible byte for byte.

use crate::scenario::Scenario;
use crate::{HarnessError, Result};
use gfm_core::gframe::{DiscreteMeasureSpace, GFrameFamily};
use gfm_core::multiplier::Symbol;
use gfm_core::opalgebra::OperatorH;
use gfm_core::{CMatrix, Cx, Tolerances};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;
use std::sync::Arc;

/// Identifier of the random algorithm, embedded in generated scenarios and
/// echoed by reports.
pub const GENERATOR_ID: &str = "chacha8";

/// How to draw the symbol of a generated scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolSpec {
    /// Constant real value at every point.
    Constant(f64),
    /// Complex values with `‖m−1‖∞` equal to the radius (attained).
    NearOne(f64),
    /// Real values in `[lo, hi]`, both endpoints attained.
    PositiveRange(f64, f64),
    /// Complex values in the square of the given half-width around zero.
    RandomComplex(f64),
}

impl FromStr for SymbolSpec {
    type Err = HarnessError;

    /// Accepts `constant:<c>`, `near-one:<radius>`, `positive:<lo>,<hi>`,
    /// `complex:<radius>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').ok_or_else(|| {
            HarnessError::Validation(format!(
                "symbol spec '{s}' must look like kind:args, e.g. constant:1.0"
            ))
        })?;
        let parse = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| {
                HarnessError::Validation(format!("bad number '{v}' in symbol spec '{s}'"))
            })
        };
        match kind {
            "constant" => Ok(SymbolSpec::Constant(parse(args)?)),
            "near-one" => {
                let r = parse(args)?;
                if r < 0.0 {
                    return Err(HarnessError::Validation(
                        "near-one radius must be nonnegative".into(),
                    ));
                }
                Ok(SymbolSpec::NearOne(r))
            }
            "positive" => {
                let (lo, hi) = args.split_once(',').ok_or_else(|| {
                    HarnessError::Validation(format!(
                        "positive spec needs two numbers, got '{args}'"
                    ))
                })?;
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if !(0.0 < lo && lo <= hi) {
                    return Err(HarnessError::Validation(format!(
                        "positive range needs 0 < lo ≤ hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(SymbolSpec::PositiveRange(lo, hi))
            }
            "complex" => {
                let r = parse(args)?;
                if r <= 0.0 {
                    return Err(HarnessError::Validation(
                        "complex radius must be positive".into(),
                    ));
                }
                Ok(SymbolSpec::RandomComplex(r))
            }
            other => Err(HarnessError::Validation(format!(
                "unknown symbol spec kind '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SymbolSpec::Constant(c) => write!(f, "constant:{c}"),
            SymbolSpec::NearOne(r) => write!(f, "near-one:{r}"),
            SymbolSpec::PositiveRange(lo, hi) => write!(f, "positive:{lo},{hi}"),
            SymbolSpec::RandomComplex(r) => write!(f, "complex:{r}"),
        }
    }
}

fn random_cx(rng: &mut ChaCha8Rng) -> Cx {
    Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_cx(rng))
}

/// Random unitary via QR of a random complex matrix.
fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    nalgebra::QR::new(random_matrix(rng, dim, dim)).q()
}

/// Draw a symbol for `n` points.
pub fn generate_symbol(rng: &mut ChaCha8Rng, spec: SymbolSpec, n: usize) -> Symbol {
    match spec {
        SymbolSpec::Constant(c) => Symbol::constant(Cx::new(c, 0.0), n),
        SymbolSpec::NearOne(radius) => {
            let values = (0..n)
                .map(|i| {
                    if i == 0 {
                        Cx::new(1.0 + radius, 0.0)
                    } else {
                        let angle = rng.random_range(0.0..std::f64::consts::TAU);
                        let len = rng.random_range(0.0..=radius);
                        Cx::new(1.0 + len * angle.cos(), len * angle.sin())
                    }
                })
                .collect();
            Symbol::new(values).expect("finite by construction")
        }
        SymbolSpec::PositiveRange(lo, hi) => {
            let values = (0..n)
                .map(|i| match i {
                    0 => Cx::new(lo, 0.0),
                    1 if n > 1 => Cx::new(hi, 0.0),
                    _ => Cx::new(rng.random_range(lo..=hi), 0.0),
                })
                .collect();
            Symbol::new(values).expect("finite by construction")
        }
        SymbolSpec::RandomComplex(radius) => {
            let values = (0..n)
                .map(|_| {
                    Cx::new(
                        rng.random_range(-radius..radius),
                        rng.random_range(-radius..radius),
                    )
                })
                .collect();
            Symbol::new(values).expect("finite by construction")
        }
    }
}

/// Generate a frame whose bound ratio `A/B` equals `ratio` up to rounding.
///
/// The upper bound is normalized to one, so the spectrum of the frame
/// operator runs linearly from `ratio` to `1`.
pub fn generate_family(
    rng: &mut ChaCha8Rng,
    space: &Arc<DiscreteMeasureSpace>,
    dim: usize,
    block_dims: &[usize],
    ratio: f64,
) -> Result<GFrameFamily> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(HarnessError::Generation(format!(
            "frame-bound ratio must lie in (0, 1], got {ratio}"
        )));
    }
    if block_dims.len() != space.len() {
        return Err(HarnessError::Generation(format!(
            "{} block dims for {} points",
            block_dims.len(),
            space.len()
        )));
    }
    let total_rows: usize = block_dims.iter().sum();
    if total_rows < dim {
        return Err(HarnessError::Generation(format!(
            "total block rows {total_rows} cannot span a {dim}-dimensional space"
        )));
    }
    if dim == 1 && ratio < 0.999 {
        return Err(HarnessError::Generation(
            "a 1-dimensional family always has A/B = 1; requested ratio is unreachable".into(),
        ));
    }

    let blocks: Vec<CMatrix> = block_dims
        .iter()
        .map(|&k| random_matrix(rng, k, dim))
        .collect();
    let raw = GFrameFamily::new(Arc::clone(space), dim, blocks)?;
    let s = raw.frame_operator();
    let (lo, hi) = s.herm_extremal_eigs()?;
    if lo <= 1e-10 * hi {
        return Err(HarnessError::Generation(
            "random draw was rank deficient; try another seed".into(),
        ));
    }

    // Parseval normalization S^{-1/2}, then a shaped Hermitian factor.
    let eig = nalgebra::SymmetricEigen::new(s.matrix().clone());
    let mut inv_sqrt = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        inv_sqrt[(i, i)] = Cx::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0);
    }
    let normalize = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint();
    let parseval = raw.right_compose(&OperatorH::from_matrix(normalize)?)?;

    let v = random_unitary(rng, dim);
    let mut shaped = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let t = if dim == 1 {
            0.0
        } else {
            i as f64 / (dim - 1) as f64
        };
        let eigenvalue = ratio + (1.0 - ratio) * t;
        shaped[(i, i)] = Cx::new(eigenvalue.sqrt(), 0.0);
    }
    let shape = &v * shaped * v.adjoint();
    Ok(parseval.right_compose(&OperatorH::from_matrix(shape)?)?)
}

/// Θ = Λ + t·E with a random direction family E, with t chosen so the
/// perturbation level of the pair equals `nu_target` up to rounding.
pub fn perturb_family(
    rng: &mut ChaCha8Rng,
    lambda: &GFrameFamily,
    nu_target: f64,
) -> Result<GFrameFamily> {
    if !(nu_target.is_finite() && nu_target >= 0.0) {
        return Err(HarnessError::Generation(format!(
            "perturbation target must be a nonnegative finite number, got {nu_target}"
        )));
    }
    if nu_target == 0.0 {
        return Ok(lambda.clone());
    }
    let d = lambda.ambient_dim();
    let noise: Vec<CMatrix> = lambda
        .block_dims()
        .iter()
        .map(|&k| random_matrix(rng, k, d))
        .collect();
    let noise_family = GFrameFamily::new(Arc::clone(lambda.space()), d, noise.clone())?;
    let level = noise_family.frame_bounds_default().upper;
    if level <= 0.0 {
        return Err(HarnessError::Generation(
            "perturbation direction collapsed to zero".into(),
        ));
    }
    let t = Cx::new((nu_target / level).sqrt(), 0.0);
    let blocks = lambda
        .blocks()
        .iter()
        .zip(&noise)
        .map(|(b, e)| b + e.map(|z| z * t))
        .collect();
    Ok(GFrameFamily::new(Arc::clone(lambda.space()), d, blocks)?)
}

/// Inputs of [`generate_scenario`].
#[derive(Debug, Clone)]
pub struct GenerateParams {
    pub seed: u64,
    pub dim: usize,
    pub points: usize,
    /// Rows per block; `None` means one row everywhere.
    pub block_dims: Option<Vec<usize>>,
    /// Target `A/B` for the lambda family, in (0, 1].
    pub ratio: f64,
    /// Target perturbation level for Θ.
    pub nu: f64,
    pub symbol: SymbolSpec,
    /// Attach the canonical dual of Λ as the scenario's dual family.
    pub with_dual: bool,
}

/// Build a full scenario from the targets, deterministically in the seed.
pub fn generate_scenario(params: &GenerateParams) -> Result<Scenario> {
    if params.dim == 0 || params.points == 0 {
        return Err(HarnessError::Generation(
            "dim and points must be at least 1".into(),
        ));
    }
    let block_dims = match &params.block_dims {
        Some(dims) => {
            if dims.len() != params.points {
                return Err(HarnessError::Generation(format!(
                    "{} block dims for {} points",
                    dims.len(),
                    params.points
                )));
            }
            dims.clone()
        }
        None => vec![1; params.points],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let weights = (0..params.points)
        .map(|_| rng.random_range(0.5..1.5))
        .collect();
    let space = Arc::new(DiscreteMeasureSpace::new(weights)?);
    let lambda = generate_family(&mut rng, &space, params.dim, &block_dims, params.ratio)?;
    let theta = perturb_family(&mut rng, &lambda, params.nu)?;
    let dual = if params.with_dual {
        Some(lambda.canonical_dual()?)
    } else {
        None
    };
    let symbol = generate_symbol(&mut rng, params.symbol, params.points);

    Ok(Scenario {
        dim: params.dim,
        space,
        lambda,
        theta: Some(theta),
        dual,
        symbol,
        nu_override: None,
        tolerances: Tolerances::default(),
        generator: Some(format!("{GENERATOR_ID}:seed={}", params.seed)),
    })
}
