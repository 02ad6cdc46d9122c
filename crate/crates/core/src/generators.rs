//! Seeded random graph generators: k-nearest-neighbour sensor graphs and
//! planted community graphs.
//!
//! Both generators retry with a fresh placement until the sampled graph is
//! connected, up to [`MAX_ATTEMPTS`] times. Attempt `a` derives its RNG from
//! `(seed, a)` so an identical seed always yields a bit-identical graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_ATTEMPTS: usize = 100;

/// Mixes a master seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorParams {
    /// Neighbours per vertex before symmetrisation.
    pub k: usize,
}

impl Default for SensorParams {
    fn default() -> Self {
        Self { k: 6 }
    }
}

/// Geometric graph on `n` uniform points in the unit square.
///
/// Each point is joined to its `k` nearest neighbours (the relation is
/// symmetrised), with weight `exp(-d^2 / (2 theta^2))` where `theta` is the
/// mean k-NN distance.
pub fn random_sensor_graph(n: usize, seed: u64, params: SensorParams) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("sensor graph needs n >= 2, got {n}")));
    }
    if params.k == 0 {
        return Err(Error::InvalidConfig("sensor graph needs k >= 1".into()));
    }
    let k = params.k.min(n - 1);
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let points: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
        let g = knn_graph(&points, k)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::ConnectivityFailure(MAX_ATTEMPTS))
}

fn knn_graph(points: &[[f64; 2]], k: usize) -> Result<Graph> {
    let n = points.len();
    let dist = |a: usize, b: usize| {
        let dx = points[a][0] - points[b][0];
        let dy = points[a][1] - points[b][1];
        (dx * dx + dy * dy).sqrt()
    };
    let mut linked = vec![vec![false; n]; n];
    let mut knn_total = 0.0;
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (dist(i, j), j)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(d, j) in &others[..k] {
            knn_total += d;
            linked[i.min(j)][i.max(j)] = true;
        }
    }
    let theta = knn_total / (n * k) as f64;
    let two_theta_sq = 2.0 * theta * theta;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if linked[i][j] {
                let d = dist(i, j);
                let w = if two_theta_sq > 0.0 { (-d * d / two_theta_sq).exp() } else { 1.0 };
                edges.push((i, j, w));
            }
        }
    }
    Graph::new(n, &edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunityParams {
    pub p_intra: f64,
    pub p_inter: f64,
}

impl Default for CommunityParams {
    fn default() -> Self {
        Self {
            p_intra: 0.3,
            p_inter: 0.01,
        }
    }
}

/// Unit-weight stochastic block graph with `n_communities` balanced,
/// contiguous communities.
pub fn random_community_graph(
    n: usize,
    n_communities: usize,
    seed: u64,
    params: CommunityParams,
) -> Result<Graph> {
    if n_communities == 0 || n < n_communities {
        return Err(Error::InvalidConfig(format!(
            "community graph needs n >= n_communities >= 1, got n={n}, communities={n_communities}"
        )));
    }
    for p in [params.p_intra, params.p_inter] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidConfig(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let community = |i: usize| i * n_communities / n;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if community(i) == community(j) { params.p_intra } else { params.p_inter };
                if rng.random::<f64>() < p {
                    edges.push((i, j, 1.0));
                }
            }
        }
        let g = Graph::new(n, &edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::ConnectivityFailure(MAX_ATTEMPTS))
}
