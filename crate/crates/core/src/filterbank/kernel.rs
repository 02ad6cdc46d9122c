use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

use super::inverse::{pr_check, PR_TOL};

/// Relative tolerance used when comparing eigenvalues against a cut-off.
const CUTOFF_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "design", rename_all = "lowercase")]
pub enum KernelDesign {
    Ideal { lambda_cut: f64, epsilon: f64 },
    Butterworth { lambda_cut: f64, beta: u32 },
    Custom,
}

/// Diagonal low-pass (or high-pass) response `H(n)`, one value per eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterKernel {
    values: Vec<f64>,
    design: KernelDesign,
}

impl FilterKernel {
    pub fn custom(values: Vec<f64>) -> Self {
        Self {
            values,
            design: KernelDesign::Custom,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn design(&self) -> KernelDesign {
        self.design
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `H_HP(n) = 1 - H_LP(n)`.
    pub fn highpass(&self) -> FilterKernel {
        FilterKernel::custom(self.values.iter().map(|h| 1.0 - h).collect())
    }

    pub fn fold_coefficients(&self) -> FoldCoefficients {
        FoldCoefficients::from_kernel(self)
    }
}

pub fn highpass_kernel(lp: &FilterKernel) -> FilterKernel {
    lp.highpass()
}

/// Two-level ideal low-pass: 1 on `lambda_n <= lambda_cut`, `epsilon` above.
///
/// Only indices below `N/2` can be in the passband; with repeated eigenvalues
/// at the boundary this caps the passband at `N/2` coefficients.
pub fn design_ideal_kernel(basis: &SpectralBasis, lambda_cut: f64, epsilon: f64) -> Result<FilterKernel> {
    let n = basis.n();
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::OddVertexCount(n));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidKernel(format!("epsilon {epsilon} outside [0, 1)")));
    }
    let lambdas = basis.eigenvalues();
    let tol = CUTOFF_TOL * basis.lambda_max().abs().max(1.0);
    let (lo, hi) = (lambdas[0], lambdas[n / 2 - 1]);
    if !(lambda_cut > lo && lambda_cut <= hi + tol) {
        return Err(Error::CutoffOutOfRange { lambda_cut, lo, hi });
    }
    let values = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| if i < n / 2 && l <= lambda_cut + tol { 1.0 } else { epsilon })
        .collect();
    let kernel = FilterKernel {
        values,
        design: KernelDesign::Ideal { lambda_cut, epsilon },
    };
    let report = pr_check(&kernel.fold_coefficients(), PR_TOL)?;
    if !report.ok {
        return Err(Error::PRViolation {
            margin: report.margin,
            worst_pair: report.worst_pair,
        });
    }
    Ok(kernel)
}

/// The exact ideal low-pass: cut at `lambda_{N/2-1}` with a zero stopband.
pub fn exact_ideal_kernel(basis: &SpectralBasis) -> Result<FilterKernel> {
    let n = basis.n();
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::OddVertexCount(n));
    }
    design_ideal_kernel(basis, basis.eigenvalues()[n / 2 - 1], 0.0)
}

/// `H(n) = (1 + (lambda_n / lambda_cut)^(2 beta))^(-1/2)`.
pub fn design_butterworth_kernel(basis: &SpectralBasis, lambda_cut: f64, beta: u32) -> Result<FilterKernel> {
    if !(lambda_cut > 0.0) || !lambda_cut.is_finite() {
        return Err(Error::CutoffOutOfRange {
            lambda_cut,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if beta == 0 {
        return Err(Error::InvalidKernel("Butterworth order must be >= 1".into()));
    }
    let exponent = 2 * beta as i32;
    let values = basis
        .eigenvalues()
        .iter()
        .map(|&l| butterworth_response(l / lambda_cut, exponent))
        .collect();
    Ok(FilterKernel {
        values,
        design: KernelDesign::Butterworth { lambda_cut, beta },
    })
}

fn butterworth_response(ratio: f64, exponent: i32) -> f64 {
    1.0 / (1.0 + ratio.powi(exponent)).sqrt()
}

/// `psi_n = 2 H_LP(n) - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldCoefficients(Vec<f64>);

impl FoldCoefficients {
    pub fn new(psi: Vec<f64>) -> Self {
        Self(psi)
    }

    pub fn from_kernel(lp: &FilterKernel) -> Self {
        Self(lp.values.iter().map(|h| 2.0 * h - 1.0).collect())
    }

    pub fn psi(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
