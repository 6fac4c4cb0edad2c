use std::ops::Deref;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig_tol, ComplexMatrix, DEFAULT_TOL};

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_TOL)
    }

    /// Validates `m` against the density-matrix invariants at tolerance `tol`.
    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let eig = hermitian_eig_tol(&m, tol)?;
        let min_eigenvalue = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotNormalized {
                re: tr.re,
                im: tr.im,
            });
        }
        Ok(Self(m))
    }

    /// Pure state `|ψ⟩⟨ψ|`; the ket is normalized first.
    pub fn pure(ket: &ComplexMatrix) -> Result<Self> {
        if ket.cols() != 1 {
            return Err(Error::InvalidShape(format!(
                "ket must be a column vector, got {}x{}",
                ket.rows(),
                ket.cols()
            )));
        }
        let norm = ket.as_dmatrix().norm();
        if norm == 0.0 {
            return Err(Error::InvalidShape("zero ket".into()));
        }
        Self::new(ComplexMatrix::projector(&ket.scale_real(1.0 / norm)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Smallest eigenvalue; a cheap PSD diagnostic for tests.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig_tol(&self.0, f64::INFINITY)
            .map(|e| e.eigenvalues[0])
            .unwrap_or(f64::NAN)
    }
}

impl Deref for DensityMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}
