//! Dense symmetric operators with a cached spectral decomposition, the
//! propagator `exp(-tA)`, the function `phi(t) = (e^t - 1)/t` and the spectral
//! norm.
//!
//! Everything downstream (amplification blocks, closed-form modal solutions,
//! power norms) works in the eigenbasis of `A`, so the decomposition is done
//! once at construction and the operator is immutable afterwards.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};

use crate::error::{check_dim, Error, Result};

/// Relative symmetry tolerance: `max|a_ij - a_ji| <= SYMMETRY_TOL * max|a_ij|`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_CLAMP_TOL * max(1, lambda_max)` are accepted and
/// clamped to zero when negative.
pub const PSD_CLAMP_TOL: f64 = 1e-10;

const PHI_SERIES_SWITCH: f64 = 1e-4;

/// A symmetric positive semidefinite matrix together with its eigenpairs.
///
/// Eigenvalues are sorted ascending and the eigenvector matrix has the
/// matching orthonormal columns.
#[derive(Debug, Clone)]
pub struct SymmetricOperator {
    entries: DMatrix<f64>,
    raw_eigenvalues: DVector<f64>,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SymmetricOperator {
    /// Validates symmetry and semidefiniteness and computes the eigenpairs.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::InvalidParams("operator must have dimension >= 1".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("operator entries must be finite".into()));
        }

        let scale = entries.amax();
        let max_asymmetry = (&entries - entries.transpose()).amax();
        let tolerance = SYMMETRY_TOL * scale;
        if max_asymmetry > tolerance {
            return Err(Error::NonSymmetric {
                max_asymmetry,
                tolerance,
            });
        }

        let sym = (&entries + entries.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);

        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

        let raw_eigenvalues = DVector::from_iterator(rows, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut eigenvectors = DMatrix::zeros(rows, rows);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }

        let lambda_top = raw_eigenvalues[rows - 1];
        let threshold = -PSD_CLAMP_TOL * lambda_top.max(1.0);
        if raw_eigenvalues[0] < threshold {
            return Err(Error::IndefiniteOperator {
                eigenvalue: raw_eigenvalues[0],
                threshold,
            });
        }
        let eigenvalues = raw_eigenvalues.map(|l| l.max(0.0));

        Ok(Self {
            entries,
            raw_eigenvalues,
            eigenvalues,
            eigenvectors,
        })
    }

    /// Builds an operator from row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        check_dim(dim * dim, entries.len())?;
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// The 1x1 operator `[value]`.
    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, value))
    }

    /// Builds `Q diag(eigenvalues) Q^T` directly from an eigen-decomposition.
    /// Used for synthetic operators with a prescribed spectrum.
    pub fn from_spectrum(eigenvalues: &[f64], basis: &DMatrix<f64>) -> Result<Self> {
        check_dim(basis.nrows(), eigenvalues.len())?;
        let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues));
        let a = basis * lambda * basis.transpose();
        Self::new((&a + a.transpose()) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Eigenvalues as used downstream: ascending and clamped at zero.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Eigenvalues as returned by the eigensolver, before clamping.
    pub fn raw_eigenvalues(&self) -> &DVector<f64> {
        &self.raw_eigenvalues
    }

    /// Orthonormal eigenvectors, one per column, ordered like `eigenvalues()`.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Smallest eigenvalue (omega).
    pub fn omega(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Spectral norm; equals `lambda_max` for a semidefinite operator.
    pub fn norm2(&self) -> f64 {
        self.lambda_max()
    }

    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), v.len())?;
        Ok(&self.entries * v)
    }

    /// Coordinates of `v` in the eigenbasis, `Q^T v`.
    pub fn to_modal(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), v.len())?;
        Ok(self.eigenvectors.tr_mul(v))
    }

    /// Inverse of [`to_modal`](Self::to_modal), `Q a`.
    pub fn from_modal(&self, a: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), a.len())?;
        Ok(&self.eigenvectors * a)
    }

    /// `Q diag(exp(-t lambda_j)) Q^T v`.
    pub fn expm_apply(&self, t: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
        expm_apply(self, t, v)
    }

    /// `|| Q Lambda Q^T - A ||_2` using the raw (unclamped) eigenvalues.
    pub fn reconstruction_error(&self) -> f64 {
        let lambda = DMatrix::from_diagonal(&self.raw_eigenvalues);
        let rebuilt = &self.eigenvectors * lambda * self.eigenvectors.transpose();
        two_norm(&(rebuilt - &self.entries))
    }
}

/// Builds a [`SymmetricOperator`] from dense symmetric entries.
pub fn spectral_decompose(entries: DMatrix<f64>) -> Result<SymmetricOperator> {
    SymmetricOperator::new(entries)
}

/// Applies the exact propagator `exp(-tA)` to `v`.
pub fn expm_apply(a: &SymmetricOperator, t: f64, v: &DVector<f64>) -> Result<DVector<f64>> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParams(format!("expm_apply needs t >= 0, got {t}")));
    }
    let mut modal = a.to_modal(v)?;
    for (c, &lambda) in modal.iter_mut().zip(a.eigenvalues().iter()) {
        *c *= (-t * lambda).exp();
    }
    a.from_modal(&modal)
}

/// `phi(t) = (e^t - 1)/t` with `phi(0) = 1`.
///
/// Below `|t| = 1e-4` the four-term Taylor series is used.
pub fn phi(t: f64) -> f64 {
    if t.abs() < PHI_SERIES_SWITCH {
        1.0 + t * (0.5 + t * (1.0 / 6.0 + t / 24.0))
    } else {
        t.exp_m1() / t
    }
}

/// Largest singular value of a 2x2 matrix, in closed form.
pub fn two_norm_2x2(m: &Matrix2<f64>) -> f64 {
    let f = m.norm_squared();
    let det = m.determinant().abs();
    let disc = (f * f - 4.0 * det * det).max(0.0);
    ((f + disc.sqrt()) * 0.5).sqrt()
}

/// Spectral norm (largest singular value) of a dense matrix.
pub fn two_norm(m: &DMatrix<f64>) -> f64 {
    match m.shape() {
        (0, _) | (_, 0) => 0.0,
        (2, 2) => two_norm_2x2(&Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])),
        _ => m
            .singular_values()
            .iter()
            .copied()
            .fold(0.0_f64, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scalar_operator() {
        let a = SymmetricOperator::scalar(1000.0).unwrap();
        assert_eq!(a.eigenvalues().as_slice(), &[1000.0]);
        assert_eq!(a.eigenvectors()[(0, 0)].abs(), 1.0);
        assert_eq!(a.omega(), 1000.0);
        assert_eq!(a.lambda_max(), 1000.0);
    }

    #[test]
    fn diagonal_operator_keeps_identity_basis() {
        let a = SymmetricOperator::from_row_slice(2, &[0.0, 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(a.eigenvalues().as_slice(), &[0.0, 3.0]);
        let q = a.eigenvectors();
        assert_relative_eq!(q[(0, 0)].abs(), 1.0);
        assert_relative_eq!(q[(1, 1)].abs(), 1.0);
        assert_eq!(q[(0, 1)], 0.0);
        assert_eq!(q[(1, 0)], 0.0);
    }

    #[test]
    fn eigenvalues_sorted_ascending() {
        let a = SymmetricOperator::from_row_slice(3, &[5.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 3.0])
            .unwrap();
        assert_eq!(a.eigenvalues().as_slice(), &[1.0, 3.0, 5.0]);
        assert!(a.reconstruction_error() < 1e-12);
    }

    #[test]
    fn rejects_nonsymmetric() {
        let err = SymmetricOperator::from_row_slice(2, &[1.0, 2.0, 2.1, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonSymmetric { .. }));
    }

    #[test]
    fn rejects_indefinite() {
        let err = SymmetricOperator::from_row_slice(2, &[1.0, 0.0, 0.0, -1e-3]).unwrap_err();
        assert!(matches!(err, Error::IndefiniteOperator { .. }));
    }

    #[test]
    fn clamps_roundoff_negative_eigenvalue() {
        let a = SymmetricOperator::from_row_slice(2, &[-1e-12, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(a.raw_eigenvalues()[0], -1e-12);
        assert_eq!(a.eigenvalues()[0], 0.0);
        assert_eq!(a.omega(), 0.0);
    }

    #[test]
    fn rejects_non_square() {
        let err = SymmetricOperator::new(DMatrix::zeros(2, 3)).unwrap_err();
        assert!(matches!(err, Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn expm_identity_at_zero() {
        let a = SymmetricOperator::from_row_slice(2, &[2.0, -1.0, -1.0, 2.0]).unwrap();
        let v = DVector::from_vec(vec![0.3, -1.7]);
        let w = a.expm_apply(0.0, &v).unwrap();
        assert_relative_eq!(w, v, epsilon = 1e-15);
    }

    #[test]
    fn expm_scalar() {
        let a = SymmetricOperator::scalar(1000.0).unwrap();
        let w = a.expm_apply(1e-3, &DVector::from_element(1, 1.0)).unwrap();
        assert_relative_eq!(w[0], (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(w[0], 0.3678794, epsilon = 1e-7);
    }

    #[test]
    fn expm_decoupled_modes() {
        let a = SymmetricOperator::from_row_slice(2, &[0.0, 0.0, 0.0, 3.0]).unwrap();
        let w = a.expm_apply(1.0, &DVector::from_vec(vec![1.0, 1.0])).unwrap();
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], (-3.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn expm_errors() {
        let a = SymmetricOperator::scalar(1.0).unwrap();
        assert!(matches!(
            a.expm_apply(1.0, &DVector::zeros(2)),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
        assert!(a.expm_apply(-1.0, &DVector::zeros(1)).is_err());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0), 1.0);
        assert_relative_eq!(phi(1.0), std::f64::consts::E - 1.0, max_relative = 1e-15);
        // s * phi(-omega s) = (1 - e^{-omega s}) / omega
        let (omega, s): (f64, f64) = (1000.0, 1e-3);
        let direct = (1.0 - (-omega * s).exp()) / omega;
        assert_relative_eq!(s * phi(-omega * s), direct, max_relative = 1e-14);
        assert_relative_eq!(direct, 6.3212e-4, epsilon = 1e-8);
    }

    #[test]
    fn phi_branches_agree_at_switch() {
        for t in [1e-4f64, -1e-4] {
            let series = 1.0 + t * (0.5 + t * (1.0 / 6.0 + t / 24.0));
            let direct = t.exp_m1() / t;
            assert!((series - direct).abs() < 1e-12);
            assert!((phi(t) - direct).abs() < 1e-12);
        }
        assert!((phi(1e-5) - phi(-1e-5)).abs() < 2e-5);
    }

    #[test]
    fn two_norm_examples() {
        assert_eq!(two_norm(&DMatrix::identity(2, 2)), 1.0);
        assert_relative_eq!(
            two_norm(&DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -5.0])),
            5.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            two_norm(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])),
            1.0,
            max_relative = 1e-15
        );
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        assert_relative_eq!(two_norm(&m), 2.0, max_relative = 1e-14);
    }
}
