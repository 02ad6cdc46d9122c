#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgfb_core::generators::{random_community_graph, random_sensor_graph, CommunityParams, SensorParams};
use sgfb_core::graph::laplacian;
use sgfb_core::spectral::eigendecompose;
use sgfb_core::{Graph, LaplacianKind, SpectralBasis};

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    Graph::new(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j, 1.0));
        }
    }
    Graph::new(n, &edges).unwrap()
}

pub fn sensor(n: usize, seed: u64) -> Graph {
    random_sensor_graph(n, seed, SensorParams::default()).unwrap()
}

pub fn community(n: usize, seed: u64) -> Graph {
    random_community_graph(n, 8, seed, CommunityParams::default()).unwrap()
}

pub fn basis(g: &Graph, kind: LaplacianKind) -> SpectralBasis {
    eigendecompose(&laplacian(g, kind).unwrap()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_signal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum();
    (num / den).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
