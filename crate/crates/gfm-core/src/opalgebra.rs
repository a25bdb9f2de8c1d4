//! Dense complex operator kernel.
//!
//! Everything downstream manipulates operators on a finite-dimensional
//! complex Hilbert space H as dense `d×d` matrices: adjoints, products,
//! spectral norms, Hermitian extremal eigenvalues, and direct inversion.
//! Direct inversion doubles as the oracle against which the Neumann
//! machinery is checked, so it reports a condition-number estimate and
//! refuses inputs that are numerically singular.

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, Cx, HERMITIAN_TOL, SINGULARITY_THRESHOLD};
use std::ops::{Add, Mul, Sub};

/// Bounded operator on H, stored as a dense `d×d` complex matrix.
///
/// Construction enforces the type invariants (square, `d ≥ 1`, finite
/// entries), so arithmetic on existing operators cannot produce shape
/// errors and norm routines never see NaN/Inf.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorH {
    mat: CMatrix,
}

impl OperatorH {
    /// Wrap a square matrix, validating the invariants.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidOperator(format!(
                "expected a square matrix, got {}×{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidOperator("dimension must be ≥ 1".into()));
        }
        if !matrix_is_finite(&mat) {
            return Err(Error::InvalidOperator("non-finite entries".into()));
        }
        Ok(OperatorH { mat })
    }

    pub fn identity(dim: usize) -> Self {
        OperatorH {
            mat: CMatrix::identity(dim, dim),
        }
    }

    /// Diagonal operator with the given complex diagonal.
    pub fn from_diagonal(diag: &[Cx]) -> Self {
        let d = diag.len();
        let mut mat = CMatrix::zeros(d, d);
        for (i, &z) in diag.iter().enumerate() {
            mat[(i, i)] = z;
        }
        OperatorH { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        OperatorH {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Conjugate transpose. An exact involution: `(A*)* = A` entrywise.
    pub fn adjoint(&self) -> Self {
        OperatorH {
            mat: self.mat.adjoint(),
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.mat * v
    }

    pub fn scale(&self, z: Cx) -> Self {
        OperatorH {
            mat: self.mat.map(|e| e * z),
        }
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        spectral_norm(&self.mat)
    }

    /// Extremal eigenvalues `(λ_min, λ_max)` of a Hermitian operator.
    ///
    /// The input must be Hermitian within `HERMITIAN_TOL·‖A‖` in spectral
    /// norm; the sub-tolerance skew is symmetrized away before solving so
    /// the reported eigenvalues are exactly real.
    pub fn herm_extremal_eigs(&self) -> Result<(f64, f64)> {
        let scale = self.op_norm();
        let deviation = spectral_norm(&(&self.mat - self.mat.adjoint()));
        let tolerance = HERMITIAN_TOL * scale;
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        let half = Cx::new(0.5, 0.0);
        let herm = (&self.mat + self.mat.adjoint()).map(|e| e * half);
        let eigs = nalgebra::SymmetricEigen::new(herm).eigenvalues;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &e in eigs.iter() {
            lo = lo.min(e);
            hi = hi.max(e);
        }
        Ok((lo, hi))
    }

    /// Direct inverse with a condition-number estimate.
    ///
    /// Returns `SingularOperator` when `σ_min < SINGULARITY_THRESHOLD·σ_max`,
    /// separating "numerically not invertible" from a theorem hypothesis
    /// merely failing.
    pub fn direct_inverse(&self) -> Result<InverseResult> {
        let svd = self.mat.clone().svd(true, true);
        let mut sigma_max: f64 = 0.0;
        let mut sigma_min = f64::INFINITY;
        for &s in svd.singular_values.iter() {
            sigma_max = sigma_max.max(s);
            sigma_min = sigma_min.min(s);
        }
        let threshold = SINGULARITY_THRESHOLD * sigma_max;
        if sigma_min <= threshold {
            return Err(Error::SingularOperator {
                sigma_min,
                threshold,
            });
        }
        let u = svd.u.as_ref().expect("u requested");
        let v_t = svd.v_t.as_ref().expect("v_t requested");
        // A⁻¹ = V Σ⁻¹ U*
        let mut sinv_ut = u.adjoint();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            let inv = Cx::new(1.0 / s, 0.0);
            for j in 0..sinv_ut.ncols() {
                sinv_ut[(i, j)] *= inv;
            }
        }
        let inverse = OperatorH {
            mat: v_t.adjoint() * sinv_ut,
        };
        Ok(InverseResult {
            inverse,
            cond: sigma_max / sigma_min,
            sigma_min,
            sigma_max,
        })
    }
}

/// Outcome of [`OperatorH::direct_inverse`].
#[derive(Debug, Clone)]
pub struct InverseResult {
    pub inverse: OperatorH,
    /// Spectral condition number `σ_max/σ_min`.
    pub cond: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Largest singular value of a (possibly rectangular) complex matrix.
pub fn spectral_norm(mat: &CMatrix) -> f64 {
    if mat.is_empty() {
        return 0.0;
    }
    let svd = mat.clone().svd(false, false);
    svd.singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub(crate) fn matrix_is_finite(mat: &CMatrix) -> bool {
    mat.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl Add for &OperatorH {
    type Output = OperatorH;
    fn add(self, rhs: &OperatorH) -> OperatorH {
        OperatorH {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &OperatorH {
    type Output = OperatorH;
    fn sub(self, rhs: &OperatorH) -> OperatorH {
        OperatorH {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul for &OperatorH {
    type Output = OperatorH;
    fn mul(self, rhs: &OperatorH) -> OperatorH {
        OperatorH {
            mat: &self.mat * &rhs.mat,
        }
    }
}
