//! Discretized continuous g-frames.
//!
//! The measure space (Ω, μ) is realized as a finite set of points with
//! positive quadrature weights. A family is one block operator `Λ_i: H → K_i`
//! per point, stored as a `k_i×d` complex matrix; the block dimensions may
//! differ per point. The frame operator is the weighted sum `Σ_i w_i Λ_i* Λ_i`
//! and the optimal frame bounds are its extremal eigenvalues.
//!
//! Weights enter synthesis and block-vector norms but not analysis, so the
//! identity `T_Λ T_Λ* = S_Λ` holds exactly by construction.

use crate::error::{Error, Result};
use crate::multiplier::{assemble_multiplier, Symbol};
use crate::opalgebra::{matrix_is_finite, spectral_norm, OperatorH};
use crate::{CMatrix, CVector, Cx, DEFAULT_FRAME_TOL};
use std::sync::Arc;

/// Finite weighted point set standing in for the measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasureSpace {
    weights: Vec<f64>,
}

impl DiscreteMeasureSpace {
    /// Validate that every weight is strictly positive and finite.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ValidationError(
                "measure space needs at least one point".into(),
            ));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::ValidationError(format!(
                    "weight {i} must be positive and finite, got {w}"
                )));
            }
        }
        Ok(DiscreteMeasureSpace { weights })
    }

    /// `n` points of unit weight.
    pub fn uniform(n: usize) -> Result<Self> {
        DiscreteMeasureSpace::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Element of the weighted direct-sum space K̂: one coefficient vector per
/// point, with the squared norm `Σ_i w_i ‖F_i‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    space: Arc<DiscreteMeasureSpace>,
    blocks: Vec<CVector>,
}

impl BlockVector {
    pub fn new(space: Arc<DiscreteMeasureSpace>, blocks: Vec<CVector>) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::DimError(format!(
                "block count {} does not match point count {}",
                blocks.len(),
                space.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            if !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidOperator(format!(
                    "block {i} has non-finite entries"
                )));
            }
        }
        Ok(BlockVector { space, blocks })
    }

    pub fn space(&self) -> &Arc<DiscreteMeasureSpace> {
        &self.space
    }

    pub fn blocks(&self) -> &[CVector] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CVector {
        &self.blocks[i]
    }

    /// Squared norm in K̂: `Σ_i w_i ‖F_i‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.space
            .weights()
            .iter()
            .zip(&self.blocks)
            .map(|(&w, b)| w * b.norm_squared())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Weighted inner product `Σ_i w_i ⟨F_i, G_i⟩`, linear in `self`.
    pub fn inner(&self, other: &BlockVector) -> Cx {
        self.space
            .weights()
            .iter()
            .zip(self.blocks.iter().zip(&other.blocks))
            .map(|(&w, (f, g))| g.dotc(f) * Cx::new(w, 0.0))
            .fold(Cx::new(0.0, 0.0), |acc, z| acc + z)
    }
}

/// Inner product on H, linear in the first argument.
pub fn inner_h(f: &CVector, g: &CVector) -> Cx {
    g.dotc(f)
}

/// Optimal frame bounds of a family: the extremal eigenvalues of its frame
/// operator, plus the frame decision at the tolerance they were asked for.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FrameBounds {
    /// Optimal lower bound `A = λ_min(S)`, clamped at zero.
    pub lower: f64,
    /// Optimal upper (Bessel) bound `B = λ_max(S)`.
    pub upper: f64,
    /// Whether `λ_min > frame_tol·λ_max` held for the tolerance used.
    pub is_frame: bool,
}

/// Indexed family of block operators. Immutable once built; all derived
/// families (scaled, composed, dual) are fresh values sharing the space.
#[derive(Debug, Clone, PartialEq)]
pub struct GFrameFamily {
    space: Arc<DiscreteMeasureSpace>,
    ambient_dim: usize,
    blocks: Vec<CMatrix>,
}

impl GFrameFamily {
    pub fn new(
        space: Arc<DiscreteMeasureSpace>,
        ambient_dim: usize,
        blocks: Vec<CMatrix>,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::ValidationError(
                "ambient dimension must be ≥ 1".into(),
            ));
        }
        if blocks.len() != space.len() {
            return Err(Error::DimError(format!(
                "family has {} blocks but the space has {} points",
                blocks.len(),
                space.len()
            )));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.ncols() != ambient_dim {
                return Err(Error::DimError(format!(
                    "block {i} has {} columns, expected ambient dimension {ambient_dim}",
                    b.ncols()
                )));
            }
            if b.nrows() == 0 {
                return Err(Error::DimError(format!("block {i} has zero rows")));
            }
            if !matrix_is_finite(b) {
                return Err(Error::InvalidOperator(format!(
                    "block {i} has non-finite entries"
                )));
            }
        }
        Ok(GFrameFamily {
            space,
            ambient_dim,
            blocks,
        })
    }

    pub fn space(&self) -> &Arc<DiscreteMeasureSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        self.space.weights()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of points (= blocks).
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    /// Frame operator `S = Σ_i w_i Λ_i* Λ_i`.
    ///
    /// Shares the multiplier assembly code path, so `S` coincides bit for
    /// bit with the unit-symbol multiplier of the family against itself.
    pub fn frame_operator(&self) -> OperatorH {
        assemble_multiplier(&Symbol::ones(self.len()), self, self)
            .expect("family is structurally compatible with itself")
    }

    /// Optimal frame bounds; `frame_tol` is relative to the upper bound.
    pub fn frame_bounds(&self, frame_tol: f64) -> FrameBounds {
        let s = self.frame_operator();
        let (lo, hi) = s
            .herm_extremal_eigs()
            .expect("frame operator is Hermitian by construction");
        FrameBounds {
            lower: lo.max(0.0),
            upper: hi,
            is_frame: lo > frame_tol * hi,
        }
    }

    pub fn frame_bounds_default(&self) -> FrameBounds {
        self.frame_bounds(DEFAULT_FRAME_TOL)
    }

    /// Analysis: `f ↦ (Λ_i f)_i`. Pointwise, unweighted.
    pub fn analysis(&self, f: &CVector) -> Result<BlockVector> {
        if f.len() != self.ambient_dim {
            return Err(Error::DimError(format!(
                "vector has length {}, expected {}",
                f.len(),
                self.ambient_dim
            )));
        }
        let blocks = self.blocks.iter().map(|b| b * f).collect();
        Ok(BlockVector {
            space: Arc::clone(&self.space),
            blocks,
        })
    }

    /// Synthesis: `F ↦ Σ_i w_i Λ_i* F_i`, the adjoint of analysis under the
    /// weighted inner product on K̂.
    pub fn synthesis(&self, coeffs: &BlockVector) -> Result<CVector> {
        if coeffs.blocks.len() != self.blocks.len() {
            return Err(Error::DimError(format!(
                "coefficient vector has {} blocks, family has {}",
                coeffs.blocks.len(),
                self.blocks.len()
            )));
        }
        if coeffs.space.weights() != self.space.weights() {
            return Err(Error::DimError(
                "coefficient vector belongs to a different measure space".into(),
            ));
        }
        let mut out = CVector::zeros(self.ambient_dim);
        for ((b, f), &w) in self.blocks.iter().zip(&coeffs.blocks).zip(self.weights()) {
            if f.len() != b.nrows() {
                return Err(Error::DimError(format!(
                    "coefficient block of length {} against block with {} rows",
                    f.len(),
                    b.nrows()
                )));
            }
            out += b.ad_mul(f) * Cx::new(w, 0.0);
        }
        Ok(out)
    }

    /// Canonical dual `Λ̃ = Λ S_Λ⁻¹`.
    pub fn canonical_dual(&self) -> Result<GFrameFamily> {
        let bounds = self.frame_bounds_default();
        if !bounds.is_frame {
            return Err(Error::NotAFrame {
                lower: bounds.lower,
                upper: bounds.upper,
            });
        }
        let s_inv = self.frame_operator().direct_inverse()?.inverse;
        self.right_compose(&s_inv)
    }

    /// Pointwise symbol scaling `mΛ = (m_i Λ_i)_i`.
    pub fn scale(&self, m: &Symbol) -> Result<GFrameFamily> {
        if m.len() != self.len() {
            return Err(Error::DimError(format!(
                "symbol has {} values, family has {} points",
                m.len(),
                self.len()
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(m.values())
            .map(|(b, &z)| b.map(|e| e * z))
            .collect();
        Ok(GFrameFamily {
            space: Arc::clone(&self.space),
            ambient_dim: self.ambient_dim,
            blocks,
        })
    }

    /// Right composition `ΛS = (Λ_i S)_i` with an operator on H.
    pub fn right_compose(&self, s: &OperatorH) -> Result<GFrameFamily> {
        if s.dim() != self.ambient_dim {
            return Err(Error::DimError(format!(
                "operator has dimension {}, ambient dimension is {}",
                s.dim(),
                self.ambient_dim
            )));
        }
        let blocks = self.blocks.iter().map(|b| b * s.matrix()).collect();
        Ok(GFrameFamily {
            space: Arc::clone(&self.space),
            ambient_dim: self.ambient_dim,
            blocks,
        })
    }

    /// Pointwise difference family `Λ − Θ`.
    pub fn family_diff(&self, other: &GFrameFamily) -> Result<GFrameFamily> {
        check_same_structure(self, other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GFrameFamily {
            space: Arc::clone(&self.space),
            ambient_dim: self.ambient_dim,
            blocks,
        })
    }
}

/// Both families live on the same space with identical block shapes.
pub fn check_same_structure(a: &GFrameFamily, b: &GFrameFamily) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimError(format!(
            "ambient dimensions differ: {} vs {}",
            a.ambient_dim, b.ambient_dim
        )));
    }
    if a.len() != b.len() {
        return Err(Error::DimError(format!(
            "point counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.space.weights() != b.space.weights() {
        return Err(Error::DimError("measure spaces differ".into()));
    }
    for i in 0..a.len() {
        if a.blocks[i].nrows() != b.blocks[i].nrows() {
            return Err(Error::DimError(format!(
                "block {i} dimensions differ: {} vs {}",
                a.blocks[i].nrows(),
                b.blocks[i].nrows()
            )));
        }
    }
    Ok(())
}

/// Smallest ν with `Σ_i w_i ‖(Λ_i − Θ_i) f‖² ≤ ν ‖f‖²`: the Bessel constant
/// of the difference family.
pub fn estimate_nu(lambda: &GFrameFamily, theta: &GFrameFamily) -> Result<f64> {
    let diff = lambda.family_diff(theta)?;
    Ok(diff.frame_bounds_default().upper.max(0.0))
}

/// Finite-Ω reading of a.e. equality: every block pair within `tol` in
/// spectral norm.
pub fn weakly_equal(lambda: &GFrameFamily, theta: &GFrameFamily, tol: f64) -> Result<bool> {
    check_same_structure(lambda, theta)?;
    let max_dev = lambda
        .blocks
        .iter()
        .zip(&theta.blocks)
        .map(|(a, b)| spectral_norm(&(a - b)))
        .fold(0.0_f64, f64::max);
    Ok(max_dev <= tol)
}
