//! Laplacian eigenbases and the graph Fourier transform.

use nalgebra::{DMatrix, DVector, DVectorView, SymmetricEigen};

use crate::error::{check_len, Error, Result};
use crate::filterbank::FilterKernel;
use crate::graph::{LaplacianKind, LaplacianMatrix};

const SYMMETRY_TOL: f64 = 1e-12;
const ORTHONORMALITY_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-8;
const ZERO_EIGENVALUE_TOL: f64 = 1e-10;
const SIGN_TOL: f64 = 1e-12;

/// Ascending eigenvalues and orthonormal eigenvectors (as columns) of a
/// Laplacian.
///
/// Each eigenvector is oriented so that its first entry with magnitude above
/// `1e-12` is positive, which makes the basis reproducible bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    kind: LaplacianKind,
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVectorView<'_, f64> {
        self.eigenvectors.column(k)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U^T f`.
    pub fn gft(&self, f: &[f64]) -> Result<SpectralSignal> {
        check_len(self.n(), f.len())?;
        let coeffs = self.eigenvectors.tr_mul(&DVector::from_column_slice(f));
        Ok(SpectralSignal(coeffs.as_slice().to_vec()))
    }

    /// `U fbar`.
    pub fn igft(&self, fbar: &SpectralSignal) -> Result<Vec<f64>> {
        check_len(self.n(), fbar.len())?;
        let f = &self.eigenvectors * DVector::from_column_slice(fbar.coeffs());
        Ok(f.as_slice().to_vec())
    }
}

/// Graph Fourier coefficients, index-aligned with a basis' eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSignal(Vec<f64>);

impl SpectralSignal {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for SpectralSignal {
    fn from(coeffs: Vec<f64>) -> Self {
        Self(coeffs)
    }
}

/// Full dense symmetric eigendecomposition of a Laplacian.
pub fn eigendecompose(lap: &LaplacianMatrix) -> Result<SpectralBasis> {
    let m = lap.matrix();
    let n = m.nrows();
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::ConvergenceFailure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = eig.eigenvectors.select_columns(&order);
    for mut col in eigenvectors.column_iter_mut() {
        if let Some(&first) = col.iter().find(|x| x.abs() > SIGN_TOL) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }

    let scale = eigenvalues.last().map_or(1.0, |l| l.abs().max(1.0));
    if let Some(&lambda0) = eigenvalues.first() {
        if lambda0 < -ZERO_EIGENVALUE_TOL * scale {
            return Err(Error::NotPositiveSemidefinite(lambda0));
        }
    }
    let gram = eigenvectors.tr_mul(&eigenvectors) - DMatrix::<f64>::identity(n, n);
    let residual = m * &eigenvectors - &eigenvectors * DMatrix::from_diagonal(&DVector::from_column_slice(&eigenvalues));
    if gram.amax() > ORTHONORMALITY_TOL || residual.amax() > RESIDUAL_TOL * scale {
        return Err(Error::ConvergenceFailure);
    }

    Ok(SpectralBasis {
        eigenvalues,
        eigenvectors,
        kind: lap.kind(),
    })
}

/// Diagonal spectral filtering: `H(n) * fbar(n)`.
pub fn apply_diagonal_filter(kernel: &FilterKernel, fbar: &SpectralSignal) -> Result<SpectralSignal> {
    check_len(kernel.len(), fbar.len())?;
    Ok(SpectralSignal(
        kernel.values().iter().zip(fbar.coeffs()).map(|(h, x)| h * x).collect(),
    ))
}
