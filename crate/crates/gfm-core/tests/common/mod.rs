//! Shared test support: seeded random instances and independent numeric
//! oracles. The oracles stay deliberately separate from the library's
//! eigen/SVD routines so they can vouch for them.

#![allow(dead_code)]

use gfm_core::gframe::{DiscreteMeasureSpace, GFrameFamily};
use gfm_core::multiplier::Symbol;
use gfm_core::{CMatrix, CVector, Cx};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cx(rng: &mut ChaCha8Rng) -> Cx {
    Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_cx(rng))
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| random_cx(rng))
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    loop {
        let v = random_vector(rng, dim);
        let n = v.norm();
        if n > 1e-3 {
            return v / Cx::new(n, 0.0);
        }
    }
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let a = random_matrix(rng, dim, dim);
    (&a + a.adjoint()).map(|z| z * Cx::new(0.5, 0.0))
}

/// Random family on a random weighted space. With `points ≥ dim` the result
/// is a frame with probability one.
pub fn random_family(
    rng: &mut ChaCha8Rng,
    dim: usize,
    points: usize,
    block_dims: &[usize],
) -> GFrameFamily {
    assert_eq!(block_dims.len(), points);
    let weights = (0..points).map(|_| rng.random_range(0.5..1.5)).collect();
    let space = Arc::new(DiscreteMeasureSpace::new(weights).unwrap());
    let blocks = block_dims
        .iter()
        .map(|&k| random_matrix(rng, k, dim))
        .collect();
    GFrameFamily::new(space, dim, blocks).unwrap()
}

/// Random block layout: `points` blocks of 1 or 2 rows each.
pub fn random_block_dims(rng: &mut ChaCha8Rng, points: usize) -> Vec<usize> {
    (0..points).map(|_| rng.random_range(1..=2)).collect()
}

/// A random frame instance of moderate size, deterministic in the seed.
pub fn frame_instance(seed: u64) -> (GFrameFamily, ChaCha8Rng) {
    let mut r = rng(seed);
    let dim = r.random_range(2..=8);
    let points = r.random_range(dim..=3 * dim);
    let dims = random_block_dims(&mut r, points);
    let fam = random_family(&mut r, dim, points, &dims);
    (fam, r)
}

/// Symbol with `‖m − 1‖∞` exactly `radius` (attained at point 0).
pub fn symbol_near_one(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Symbol {
    let values = (0..n)
        .map(|i| {
            if i == 0 {
                Cx::new(1.0 + radius, 0.0)
            } else {
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                let len = rng.random_range(0.0..radius);
                Cx::new(1.0 + len * angle.cos(), len * angle.sin())
            }
        })
        .collect();
    Symbol::new(values).unwrap()
}

/// Real positive symbol with values in `[lo, hi]`, both ends attained.
pub fn symbol_positive(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Symbol {
    let values = (0..n)
        .map(|i| match i {
            0 => Cx::new(lo, 0.0),
            1 if n > 1 => Cx::new(hi, 0.0),
            _ => Cx::new(rng.random_range(lo..=hi), 0.0),
        })
        .collect();
    Symbol::new(values).unwrap()
}

pub fn random_complex_symbol(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Symbol {
    let values = (0..n)
        .map(|_| {
            Cx::new(
                rng.random_range(-radius..radius),
                rng.random_range(-radius..radius),
            )
        })
        .collect();
    Symbol::new(values).unwrap()
}

/// Θ = Λ + t·E with a random direction family E, where t is chosen so the
/// perturbation level of the pair is `nu_target` up to scaling rounding.
pub fn perturb_family(
    rng: &mut ChaCha8Rng,
    lambda: &GFrameFamily,
    nu_target: f64,
) -> GFrameFamily {
    if nu_target == 0.0 {
        return lambda.clone();
    }
    let d = lambda.ambient_dim();
    let noise: Vec<CMatrix> = lambda
        .block_dims()
        .iter()
        .map(|&k| random_matrix(rng, k, d))
        .collect();
    let noise_family =
        GFrameFamily::new(Arc::clone(lambda.space()), d, noise.clone()).unwrap();
    let noise_level = noise_family.frame_bounds_default().upper;
    let t = (nu_target / noise_level).sqrt();
    let blocks = lambda
        .blocks()
        .iter()
        .zip(&noise)
        .map(|(b, e)| b + e.map(|z| z * Cx::new(t, 0.0)))
        .collect();
    GFrameFamily::new(Arc::clone(lambda.space()), d, blocks).unwrap()
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

/// Eigenvalues of a Hermitian complex matrix by cyclic Jacobi rotations.
///
/// Independent of the library's eigen routines; used only as a test oracle.
pub fn jacobi_hermitian_eigenvalues(mat: &CMatrix) -> Vec<f64> {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols());
    let mut a = mat.clone();
    let frob = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[(p, q)];
                let b = beta.norm();
                if b <= 1e-300 {
                    continue;
                }
                // Phase column p so the pivot becomes real, then rotate.
                let phase = beta / Cx::new(b, 0.0);
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column update: U has U[p,p] = e^{iφ}c, U[q,p] = −s,
                // U[p,q] = e^{iφ}s, U[q,q] = c.
                let upp = phase * Cx::new(c, 0.0);
                let upq = phase * Cx::new(s, 0.0);
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp - akq * Cx::new(s, 0.0);
                    a[(k, q)] = akp * upq + akq * Cx::new(c, 0.0);
                }
                let cpp = upp.conj();
                let cpq = upq.conj();
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cpp * apk - Cx::new(s, 0.0) * aqk;
                    a[(q, k)] = cpq * apk + Cx::new(c, 0.0) * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)].re).collect()
}

/// Largest singular value via the Jacobi oracle on `A*A`.
pub fn oracle_spectral_norm(mat: &CMatrix) -> f64 {
    let gram = mat.ad_mul(mat);
    jacobi_hermitian_eigenvalues(&gram)
        .into_iter()
        .fold(0.0_f64, f64::max)
        .max(0.0)
        .sqrt()
}

/// Extremal Rayleigh quotients of a Hermitian operator over `samples`
/// random unit vectors: a lower bound on λ_max and an upper bound on λ_min.
pub fn rayleigh_extremes(
    rng: &mut ChaCha8Rng,
    mat: &CMatrix,
    samples: usize,
) -> (f64, f64) {
    let n = mat.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..samples {
        let v = random_unit_vector(rng, n);
        let mv = mat * &v;
        let q = v.dotc(&mv).re;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    (lo, hi)
}

/// `Σ_i w_i Λ_i* Λ_i` accumulated in reverse point order.
pub fn frame_operator_reversed(fam: &GFrameFamily) -> CMatrix {
    let d = fam.ambient_dim();
    let mut acc = CMatrix::zeros(d, d);
    for i in (0..fam.len()).rev() {
        let b = fam.block(i);
        acc += b.ad_mul(b) * Cx::new(fam.weights()[i], 0.0);
    }
    acc
}

/// Weighted gram `Σ_i w_i (Λ_i − Θ_i)* (Λ_i − Θ_i)` built blockwise.
pub fn difference_gram(lambda: &GFrameFamily, theta: &GFrameFamily) -> CMatrix {
    let d = lambda.ambient_dim();
    let mut acc = CMatrix::zeros(d, d);
    for i in 0..lambda.len() {
        let diff = lambda.block(i) - theta.block(i);
        acc += diff.ad_mul(&diff) * Cx::new(lambda.weights()[i], 0.0);
    }
    acc
}
