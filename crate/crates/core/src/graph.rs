//! Weighted undirected graphs, Laplacians and Kron reduction.
//!
//! Graphs are stored densely: the targeted sizes are at most a few thousand
//! vertices, and every downstream consumer (eigendecomposition, Schur
//! complements, vertex-domain filters) works on dense matrices anyway.

use std::collections::{HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

/// An undirected weighted edge, stored once with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Weighted undirected graph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: DMatrix<f64>,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    ///
    /// Each undirected pair may appear at most once, in either orientation.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut adjacency = DMatrix::zeros(n, n);
        let mut seen = HashSet::with_capacity(edges.len());
        let mut stored = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::NegativeWeight { u, v, weight: w });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge(a, b));
            }
            adjacency[(a, b)] = w;
            adjacency[(b, a)] = w;
            stored.push(Edge { u: a, v: b, w });
        }
        Ok(Self {
            n,
            edges: stored,
            adjacency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    /// Weighted degrees (row sums of the adjacency matrix).
    pub fn degrees(&self) -> Vec<f64> {
        self.adjacency.row_iter().map(|r| r.sum()).collect()
    }

    /// Breadth-first reachability over edges with positive weight.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut neighbors = vec![Vec::new(); self.n];
        for e in self.edges.iter().filter(|e| e.w > 0.0) {
            neighbors[e.u].push(e.v);
            neighbors[e.v].push(e.u);
        }
        let mut visited = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        visited[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &neighbors[i] {
                if !visited[j] {
                    visited[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    /// `D^{-1/2} A D^{-1/2}`.
    pub fn normalized_adjacency(&self) -> Result<DMatrix<f64>> {
        let inv_sqrt = inverse_sqrt_degrees(&self.degrees())?;
        Ok(DMatrix::from_fn(self.n, self.n, |i, j| {
            inv_sqrt[i] * self.adjacency[(i, j)] * inv_sqrt[j]
        }))
    }
}

fn inverse_sqrt_degrees(degrees: &[f64]) -> Result<Vec<f64>> {
    degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if d > 0.0 {
                Ok(1.0 / d.sqrt())
            } else {
                Err(Error::ZeroDegreeVertex(i))
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    /// `L = D - A`
    Combinatorial,
    /// `I - D^{-1/2} A D^{-1/2}`
    Normalized,
}

impl std::fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LaplacianKind::Combinatorial => f.write_str("combinatorial"),
            LaplacianKind::Normalized => f.write_str("normalized"),
        }
    }
}

impl std::str::FromStr for LaplacianKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "combinatorial" | "comb" => Ok(LaplacianKind::Combinatorial),
            "normalized" | "norm" => Ok(LaplacianKind::Normalized),
            other => Err(format!("unknown Laplacian kind `{other}`")),
        }
    }
}

/// A graph Laplacian of either kind.
///
/// The combinatorial Laplacian is always retained next to the selected
/// matrix because Kron reduction is performed on it regardless of `kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    kind: LaplacianKind,
    matrix: DMatrix<f64>,
    combinatorial: DMatrix<f64>,
}

impl LaplacianMatrix {
    /// Wraps a combinatorial Laplacian (symmetric, zero row sums) and derives
    /// the requested kind from its diagonal.
    pub fn from_combinatorial(combinatorial: DMatrix<f64>, kind: LaplacianKind) -> Result<Self> {
        let matrix = match kind {
            LaplacianKind::Combinatorial => combinatorial.clone(),
            LaplacianKind::Normalized => normalize(&combinatorial)?,
        };
        Ok(Self {
            kind,
            matrix,
            combinatorial,
        })
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn combinatorial(&self) -> &DMatrix<f64> {
        &self.combinatorial
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

fn normalize(combinatorial: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let degrees: Vec<f64> = combinatorial.diagonal().iter().copied().collect();
    let inv_sqrt = inverse_sqrt_degrees(&degrees)?;
    let n = combinatorial.nrows();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            inv_sqrt[i] * combinatorial[(i, j)] * inv_sqrt[j]
        }
    }))
}

pub fn laplacian(g: &Graph, kind: LaplacianKind) -> Result<LaplacianMatrix> {
    let mut comb = -g.adjacency().clone();
    for (i, d) in g.degrees().into_iter().enumerate() {
        comb[(i, i)] = d;
    }
    LaplacianMatrix::from_combinatorial(comb, kind)
}

/// A sorted set of distinct vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &i in &self.0 {
            if i < n {
                mask[i] = true;
            }
        }
        mask
    }

    /// Indices in `0..n` not in the set.
    pub fn complement(&self, n: usize) -> VertexSet {
        let mask = self.mask(n);
        VertexSet((0..n).filter(|&i| !mask[i]).collect())
    }
}

/// Picks the `n/2` vertices where the highest-frequency eigenvector is largest.
///
/// Ties go to the lower index; the result is sorted ascending.
pub fn select_sampling_set(basis: &SpectralBasis) -> Result<VertexSet> {
    let n = basis.n();
    if !n.is_multiple_of(2) {
        return Err(Error::OddVertexCount(n));
    }
    let last = basis.eigenvector(n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| last[b].total_cmp(&last[a]).then(a.cmp(&b)));
    order.truncate(n / 2);
    Ok(VertexSet::new(order))
}

/// Schur complement of the combinatorial Laplacian onto `keep`.
///
/// The returned Laplacian has the same kind as `lap`; a normalized result is
/// derived from the reduced combinatorial Laplacian's degrees.
pub fn kron_reduce(lap: &LaplacianMatrix, keep: &VertexSet) -> Result<LaplacianMatrix> {
    let n = lap.n();
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    if keep.len() >= n || keep.indices().iter().any(|&i| i >= n) {
        return Err(Error::InvalidKeepSet);
    }
    let kept = keep.indices();
    let removed = keep.complement(n);
    let removed = removed.indices();
    let l = lap.combinatorial();

    let l_vv = l.select_rows(kept).select_columns(kept);
    let l_vr = l.select_rows(kept).select_columns(removed);
    let l_rr = l.select_rows(removed).select_columns(removed);

    let scale = l_rr.diagonal().amax().max(f64::MIN_POSITIVE);
    let chol = l_rr.cholesky().ok_or(Error::SingularInteriorBlock)?;
    let min_pivot = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |m, &d| m.min(d * d));
    if min_pivot <= 1e-12 * scale {
        return Err(Error::SingularInteriorBlock);
    }
    let x = chol.solve(&l_vr.transpose());
    let mut reduced = l_vv - &l_vr * x;

    // Restore exact symmetry and zero row sums lost to rounding.
    let m = reduced.nrows();
    for i in 0..m {
        for j in (i + 1)..m {
            let avg = 0.5 * (reduced[(i, j)] + reduced[(j, i)]);
            reduced[(i, j)] = avg;
            reduced[(j, i)] = avg;
        }
    }
    for i in 0..m {
        let off: f64 = (0..m).filter(|&j| j != i).map(|j| reduced[(i, j)]).sum();
        reduced[(i, i)] = -off;
    }
    LaplacianMatrix::from_combinatorial(reduced, lap.kind())
}

/// Row sums of a matrix, used by invariant checks.
pub fn row_sums(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.sum()))
}
