//! Density matrices.

use crate::error::{Error, Result};
use crate::tensor::{self, ComplexMatrix, C64, HERMITIAN_TOL, PSD_TOL};

/// Trace tolerance for a valid state.
pub const TRACE_TOL: f64 = 1e-10;
/// Second-largest eigenvalue below which a state counts as pure.
pub const PURITY_TOL: f64 = 1e-10;

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` at the default tolerances.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL.max(PSD_TOL))
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let herm = matrix.hermiticity_deviation();
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = tensor::trace(&matrix)?;
        if (tr - C64::new(1.0, 0.0)).norm() > tol.max(TRACE_TOL) {
            return Err(Error::InvalidState(format!(
                "trace is {:.12}{:+.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min = matrix.hermitian_eigenvalues()?[0];
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Pure state `|v⟩⟨v|` for a nonzero vector, normalized first.
    pub fn from_pure(v: &[C64]) -> Result<Self> {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v.is_empty() || n < 1e-300 || !n.is_finite() {
            return Err(Error::InvalidState(
                "pure state vector must be nonzero".into(),
            ));
        }
        let u: Vec<C64> = v.iter().map(|z| z / n).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&u, &u),
        })
    }

    /// `e_i e_i†` in dimension `dim`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dimension {dim}");
        Self {
            matrix: ComplexMatrix::unit(dim, dim, i, i),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Rank one within `tol` (second-largest eigenvalue at most `tol`).
    pub fn is_pure(&self, tol: f64) -> bool {
        match self.matrix.hermitian_eigenvalues() {
            Ok(values) if values.len() >= 2 => values[values.len() - 2] <= tol,
            Ok(_) => true,
            Err(_) => false,
        }
    }

    /// `½‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        0.5 * tensor::trace_norm(&(&self.matrix - &other.matrix))
    }

    /// `⟨i|ρ|i⟩`.
    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_matrices() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(not_unit),
            Err(Error::InvalidState(_))
        ));
        let negative = ComplexMatrix::diag(&[C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(negative).is_err());
        let non_herm = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(DensityMatrix::new(non_herm).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn purity() {
        assert!(DensityMatrix::basis_state(3, 1).is_pure(PURITY_TOL));
        assert!(!DensityMatrix::maximally_mixed(2).is_pure(PURITY_TOL));
        let plus = DensityMatrix::from_pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!(plus.is_pure(PURITY_TOL));
        assert!((tensor::trace_norm(plus.matrix()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let a = DensityMatrix::basis_state(2, 0);
        let b = DensityMatrix::basis_state(2, 1);
        assert!((a.trace_distance(&b) - 1.0).abs() < 1e-14);
        assert_eq!(a.trace_distance(&a), 0.0);
    }
}
