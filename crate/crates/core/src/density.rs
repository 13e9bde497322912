//! Density matrices and fidelity against pure references.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::TargetState;
use crate::error::{Error, Result};

/// Validated density operator: hermitian, unit trace, positive semidefinite
/// up to a small numerical slack on the eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let herm_dev = (&mat - mat.adjoint()).norm();
        if herm_dev > 1e-10 {
            return Err(Error::BadDensity(format!(
                "hermiticity deviation {herm_dev:.3e}"
            )));
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::BadDensity(format!("trace {trace}")));
        }
        let eig = nalgebra::SymmetricEigen::new(mat.clone());
        if let Some(min) = eig
            .eigenvalues
            .iter()
            .cloned()
            .reduce(|a, b| if a < b { a } else { b })
        {
            if min < -1e-10 {
                return Err(Error::BadDensity(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

/// ⟨x|ρ|x⟩ for a pure reference |x⟩; real by hermiticity.
pub fn fidelity(rho: &DensityMatrix, target: &TargetState) -> Result<f64> {
    if rho.dim() != target.d() {
        return Err(Error::DimensionMismatch {
            channel: rho.dim(),
            target: target.d(),
        });
    }
    let v = nalgebra::DVector::from_column_slice(target.amplitudes());
    let val = (v.adjoint() * rho.matrix() * &v)[(0, 0)];
    Ok(val.re)
}
