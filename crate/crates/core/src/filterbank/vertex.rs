//! Vertex-sampling spline filter bank.
//!
//! The low-pass filter is `H_LP = (I + B) / 2` with `B = sum_l w_l A^l` a
//! polynomial in the normalized adjacency `A`, and `H_HP = I - H_LP`. The
//! low-pass channel keeps the vertices of `keep`, the high-pass channel keeps
//! the complement. Recombining gives `y = (I + K B) f / 2` with `K = +1` on
//! kept vertices and `-1` elsewhere, inverted by a dense solve.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::spectral::SpectralBasis;

/// Condition estimates above this are reported as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Weight presets for `B = sum_l w_l A^l`.
pub mod presets {
    /// `B = A`.
    pub const LINEAR: &[f64] = &[1.0];
    /// Third-order smoothing polynomial.
    pub const CUBIC: &[f64] = &[1.5, -0.6, 0.1];
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexBank {
    weights: Vec<f64>,
    keep: VertexSet,
    signs: Vec<f64>,
    b_matrix: DMatrix<f64>,
    condition: f64,
}

/// Subband samples: low-pass values on the kept vertices, high-pass values on
/// the rest, both in ascending vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSubbands {
    pub lp: Vec<f64>,
    pub hp: Vec<f64>,
}

pub fn vs_build(g: &Graph, weights: &[f64], keep: &VertexSet) -> Result<VertexBank> {
    let a = g.normalized_adjacency()?;
    vs_build_from_operator(&a, weights, keep)
}

/// Builds the bank from an explicit symmetric shift operator.
pub fn vs_build_from_operator(a: &DMatrix<f64>, weights: &[f64], keep: &VertexSet) -> Result<VertexBank> {
    let n = a.nrows();
    if weights.is_empty() {
        return Err(Error::InvalidConfig("vertex bank needs at least one weight".into()));
    }
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    if keep.len() >= n || keep.indices().iter().any(|&i| i >= n) {
        return Err(Error::InvalidKeepSet);
    }

    // Horner: B = A (w_1 I + A (w_2 I + ... + A w_J I))
    let identity = DMatrix::<f64>::identity(n, n);
    let mut acc = &identity * weights[weights.len() - 1];
    for &w in weights.iter().rev().skip(1) {
        acc = a * acc + &identity * w;
    }
    let b_matrix = a * acc;

    let signs: Vec<f64> = keep.mask(n).into_iter().map(|k| if k { 1.0 } else { -1.0 }).collect();
    let m = synthesis_matrix(&b_matrix, &signs);
    let condition = condition_estimate(&m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularVertexSynthesis(condition));
    }
    Ok(VertexBank {
        weights: weights.to_vec(),
        keep: keep.clone(),
        signs,
        b_matrix,
        condition,
    })
}

/// `I + K B`.
fn synthesis_matrix(b: &DMatrix<f64>, signs: &[f64]) -> DMatrix<f64> {
    let n = b.nrows();
    DMatrix::from_fn(n, n, |i, j| signs[i] * b[(i, j)] + if i == j { 1.0 } else { 0.0 })
}

/// 1-norm condition number from an explicit inverse; infinite when singular.
fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let norm1 = |x: &DMatrix<f64>| {
        x.column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    match m.clone().lu().try_inverse() {
        Some(inv) => {
            let c = norm1(m) * norm1(&inv);
            if c.is_finite() { c } else { f64::INFINITY }
        }
        None => f64::INFINITY,
    }
}

impl VertexBank {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn keep_set(&self) -> &VertexSet {
        &self.keep
    }

    pub fn b_matrix(&self) -> &DMatrix<f64> {
        &self.b_matrix
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn n(&self) -> usize {
        self.b_matrix.nrows()
    }

    /// Low-pass response `(1 + psi_n) / 2` with `psi_n = sum_l w_l (1 - lambda_n)^l`,
    /// for a basis of the normalized Laplacian.
    pub fn spectral_response(&self, basis: &SpectralBasis) -> Vec<f64> {
        basis
            .eigenvalues()
            .iter()
            .map(|&l| {
                let x = 1.0 - l;
                let psi = self.weights.iter().rev().fold(0.0, |acc, &w| (acc + w) * x);
                0.5 * (1.0 + psi)
            })
            .collect()
    }

    pub fn analyze(&self, f: &[f64]) -> Result<VertexSubbands> {
        check_len(self.n(), f.len())?;
        let fv = DVector::from_column_slice(f);
        let bf = &self.b_matrix * &fv;
        let mut sub = VertexSubbands {
            lp: Vec::with_capacity(self.keep.len()),
            hp: Vec::with_capacity(self.n() - self.keep.len()),
        };
        for i in 0..self.n() {
            if self.signs[i] > 0.0 {
                sub.lp.push(0.5 * (fv[i] + bf[i]));
            } else {
                sub.hp.push(0.5 * (fv[i] - bf[i]));
            }
        }
        Ok(sub)
    }

    /// Recombines the channels and solves `f = 2 (I + K B)^{-1} y` densely.
    pub fn synthesize(&self, sub: &VertexSubbands) -> Result<Vec<f64>> {
        let n = self.n();
        check_len(self.keep.len(), sub.lp.len())?;
        check_len(n - self.keep.len(), sub.hp.len())?;
        let (mut lp, mut hp) = (sub.lp.iter(), sub.hp.iter());
        let y = DVector::from_iterator(
            n,
            self.signs.iter().map(|&s| if s > 0.0 { *lp.next().unwrap() } else { *hp.next().unwrap() }),
        );
        let m = synthesis_matrix(&self.b_matrix, &self.signs);
        let x = m
            .lu()
            .solve(&y)
            .ok_or(Error::SingularVertexSynthesis(f64::INFINITY))?;
        Ok(x.iter().map(|v| 2.0 * v).collect())
    }

    pub fn roundtrip(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.synthesize(&self.analyze(f)?)
    }
}

pub fn vs_roundtrip(bank: &VertexBank, f: &[f64]) -> Result<Vec<f64>> {
    bank.roundtrip(f)
}
