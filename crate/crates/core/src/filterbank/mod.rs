//! Two-channel critically-sampled filter bank with spectral sampling.
//!
//! Analysis filters the graph Fourier coefficients with a low-pass kernel and
//! its complement, then folds each channel onto `N/2` coefficients by pairing
//! index `k` with its mirror `N-1-k` (sum for the low-pass channel,
//! difference for the high-pass channel). Synthesis unfolds, recombines and
//! undoes the combine matrix with the closed-form inverse in
//! [`SynthesisInverse`]. No sampling or combine matrix is ever materialised.
//!
//! A vertex-sampling bank built from polynomials of the normalized adjacency
//! lives in [`vertex`] as a reference point for accuracy and cost.

mod inverse;
mod kernel;
pub mod vertex;

pub use inverse::{dense_c_matrix, pr_check, PrReport, SynthesisInverse, PR_TOL};
pub use kernel::{
    design_butterworth_kernel, design_ideal_kernel, exact_ideal_kernel, highpass_kernel, FilterKernel,
    FoldCoefficients, KernelDesign,
};

use crate::error::{check_len, Error, Result};
use crate::spectral::{SpectralBasis, SpectralSignal};

/// Low-pass and high-pass subband coefficients, `N/2` each.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandCoefficients {
    pub d_lp: Vec<f64>,
    pub d_hp: Vec<f64>,
}

impl SubbandCoefficients {
    pub fn zeros(half: usize) -> Self {
        Self {
            d_lp: vec![0.0; half],
            d_hp: vec![0.0; half],
        }
    }

    /// Total coefficient count (`N`).
    pub fn len(&self) -> usize {
        self.d_lp.len() + self.d_hp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coefficients in global order: low-pass block first.
    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.d_lp.iter().chain(self.d_hp.iter())
    }

    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let half = self.d_lp.len();
        Self {
            d_lp: self.d_lp.iter().enumerate().map(|(i, &c)| f(i, c)).collect(),
            d_hp: self.d_hp.iter().enumerate().map(|(i, &c)| f(half + i, c)).collect(),
        }
    }
}

fn require_even(n: usize) -> Result<usize> {
    if !n.is_multiple_of(2) || n == 0 {
        Err(Error::OddVertexCount(n))
    } else {
        Ok(n / 2)
    }
}

/// Filters and folds spectral coefficients:
/// `d_lp(k) = H(k) u(k) + H(N-1-k) u(N-1-k)` and
/// `d_hp(k) = G(k) u(k) - G(N-1-k) u(N-1-k)` with `G = 1 - H`.
pub fn analyze_spectrum(lp: &FilterKernel, fbar: &SpectralSignal) -> Result<SubbandCoefficients> {
    let n = fbar.len();
    let half = require_even(n)?;
    check_len(n, lp.len())?;
    let h = lp.values();
    let u = fbar.coeffs();
    let mut sub = SubbandCoefficients::zeros(half);
    for k in 0..half {
        let m = n - 1 - k;
        sub.d_lp[k] = h[k] * u[k] + h[m] * u[m];
        sub.d_hp[k] = (1.0 - h[k]) * u[k] - (1.0 - h[m]) * u[m];
    }
    Ok(sub)
}

/// Upsamples and recombines: `y(k) = d_lp(k) + d_hp(k)`,
/// `y(N-1-k) = d_lp(k) - d_hp(k)`.
pub fn combine_subbands(sub: &SubbandCoefficients) -> Result<Vec<f64>> {
    let half = sub.d_lp.len();
    check_len(half, sub.d_hp.len())?;
    let n = 2 * half;
    let mut y = vec![0.0; n];
    for k in 0..half {
        y[k] = sub.d_lp[k] + sub.d_hp[k];
        y[n - 1 - k] = sub.d_lp[k] - sub.d_hp[k];
    }
    Ok(y)
}

pub fn analyze(basis0: &SpectralBasis, lp: &FilterKernel, f: &[f64]) -> Result<SubbandCoefficients> {
    require_even(basis0.n())?;
    analyze_spectrum(lp, &basis0.gft(f)?)
}

pub fn synthesize(basis0: &SpectralBasis, inv: &SynthesisInverse, sub: &SubbandCoefficients) -> Result<Vec<f64>> {
    let n = basis0.n();
    let half = require_even(n)?;
    check_len(half, sub.d_lp.len())?;
    check_len(half, sub.d_hp.len())?;
    check_len(n, inv.len())?;
    let y = combine_subbands(sub)?;
    let z = inv.apply(&y)?;
    basis0.igft(&SpectralSignal::new(z))
}

/// Maps one subband to the vertex domain of the reduced graph: `U_1 d`.
pub fn subband_to_reduced_vertex(basis1: &SpectralBasis, d: &[f64]) -> Result<Vec<f64>> {
    basis1.igft(&SpectralSignal::new(d.to_vec()))
}

/// A designed analysis/synthesis pair bound to one graph basis.
#[derive(Debug, Clone)]
pub struct SpectralFilterBank<'a> {
    basis: &'a SpectralBasis,
    lowpass: FilterKernel,
    inverse: SynthesisInverse,
}

impl<'a> SpectralFilterBank<'a> {
    pub fn new(basis: &'a SpectralBasis, lowpass: FilterKernel) -> Result<Self> {
        Self::with_tolerance(basis, lowpass, PR_TOL)
    }

    pub fn with_tolerance(basis: &'a SpectralBasis, lowpass: FilterKernel, tol: f64) -> Result<Self> {
        require_even(basis.n())?;
        check_len(basis.n(), lowpass.len())?;
        let inverse = SynthesisInverse::new(&lowpass.fold_coefficients(), tol)?;
        Ok(Self {
            basis,
            lowpass,
            inverse,
        })
    }

    pub fn basis(&self) -> &'a SpectralBasis {
        self.basis
    }

    pub fn lowpass(&self) -> &FilterKernel {
        &self.lowpass
    }

    pub fn highpass(&self) -> FilterKernel {
        self.lowpass.highpass()
    }

    pub fn inverse(&self) -> &SynthesisInverse {
        &self.inverse
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn analyze(&self, f: &[f64]) -> Result<SubbandCoefficients> {
        analyze(self.basis, &self.lowpass, f)
    }

    pub fn synthesize(&self, sub: &SubbandCoefficients) -> Result<Vec<f64>> {
        synthesize(self.basis, &self.inverse, sub)
    }
}
