//! Perfect-reconstruction check and the closed-form synthesis inverse.
//!
//! Upsampling and recombining the two spectral subbands yields
//! `y = (I + J Psi) fbar`, where `J` reverses indices and `Psi = diag(psi)`.
//! That combine matrix only couples index `k` with its mirror `N-1-k`, so it
//! splits into `N/2` independent 2x2 systems
//!
//! ```text
//! y(k)     = z(k)     + psi(N-1-k) z(N-1-k)
//! y(N-1-k) = z(N-1-k) + psi(k)     z(k)
//! ```
//!
//! with determinant `1 - psi(k) psi(N-1-k)`. Solving each pair gives
//! `z = PsiTilde (I - J Psi) y`, two multiplications per output coefficient.

use std::ops::{Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{check_len, Error, Result};

use super::kernel::FoldCoefficients;

/// Default minimum pair determinant accepted as invertible.
pub const PR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrReport {
    pub ok: bool,
    /// `min_k |1 - psi(k) psi(N-1-k)|` over `k < N/2`.
    pub margin: f64,
    /// The `k < N/2` attaining the margin (lowest such index).
    pub worst_pair: usize,
}

pub fn pr_check(psi: &FoldCoefficients, tol: f64) -> Result<PrReport> {
    let psi = psi.psi();
    let n = psi.len();
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::OddVertexCount(n));
    }
    let (worst_pair, margin) = (0..n / 2)
        .map(|k| (k, (1.0 - psi[k] * psi[n - 1 - k]).abs()))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(PrReport {
        ok: margin > tol,
        margin,
        worst_pair,
    })
}

/// `C^{-1} = PsiTilde (I - J Psi)` held as two length-`N` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisInverse {
    psi: Vec<f64>,
    psi_tilde: Vec<f64>,
    report: PrReport,
}

impl SynthesisInverse {
    pub fn new(psi: &FoldCoefficients, tol: f64) -> Result<Self> {
        let report = pr_check(psi, tol)?;
        if !report.ok {
            return Err(Error::SingularSynthesis {
                margin: report.margin,
                worst_pair: report.worst_pair,
            });
        }
        let psi = psi.psi().to_vec();
        let n = psi.len();
        let mut psi_tilde = vec![0.0; n];
        for k in 0..n / 2 {
            let t = 1.0 / (1.0 - psi[k] * psi[n - 1 - k]);
            psi_tilde[k] = t;
            psi_tilde[n - 1 - k] = t;
        }
        Ok(Self {
            psi,
            psi_tilde,
            report,
        })
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn psi_tilde(&self) -> &[f64] {
        &self.psi_tilde
    }

    pub fn report(&self) -> PrReport {
        self.report
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// Solves `C z = y`.
    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut z = vec![0.0; y.len()];
        self.apply_into(y, &mut z)?;
        Ok(z)
    }

    /// Solves `C z = y` into `out`, generic over the scalar so the exact
    /// operation count can be observed with an instrumented number type.
    pub fn apply_into<T>(&self, y: &[T], out: &mut [T]) -> Result<()>
    where
        T: Copy + From<f64> + Mul<Output = T> + Sub<Output = T>,
    {
        let n = self.psi.len();
        check_len(n, y.len())?;
        check_len(n, out.len())?;
        for k in 0..n {
            let mirror = n - 1 - k;
            out[k] = T::from(self.psi_tilde[k]) * (y[k] - T::from(self.psi[mirror]) * y[mirror]);
        }
        Ok(())
    }
}

/// The dense combine matrix `C = I + J Psi`: ones on the diagonal and
/// `C(i, N-1-i) = psi(N-1-i)` on the anti-diagonal.
///
/// Only used as a reference for tests; the synthesis path never forms it.
pub fn dense_c_matrix(psi: &FoldCoefficients) -> Result<DMatrix<f64>> {
    let psi = psi.psi();
    let n = psi.len();
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::OddVertexCount(n));
    }
    let mut c = DMatrix::identity(n, n);
    for i in 0..n {
        c[(i, n - 1 - i)] = psi[n - 1 - i];
    }
    Ok(c)
}
