#![allow(dead_code)]

use ndarray::Array2;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use sec_gfd::graph::{LaplacianKind, SparseGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi style graph with edge probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> SparseGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    SparseGraph::from_edges(n, &edges).unwrap()
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
}

pub fn random_signal(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        if x.iter().any(|&v| v != 0.0) {
            return x;
        }
    }
}

/// Symmetrized 0/1 adjacency built directly from an edge list.
pub fn dense_adjacency(n: usize, edges: &[(usize, usize)]) -> Array2<f64> {
    let mut a = Array2::zeros((n, n));
    for &(u, v) in edges {
        if u != v {
            a[[u, v]] = 1.0;
            a[[v, u]] = 1.0;
        }
    }
    a
}

pub fn dense_laplacian(a: &Array2<f64>, kind: LaplacianKind) -> Array2<f64> {
    let n = a.nrows();
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            l[[i, j]] = match kind {
                LaplacianKind::Unnormalized => {
                    if i == j {
                        deg[i]
                    } else {
                        -a[[i, j]]
                    }
                }
                LaplacianKind::SymNormalized => {
                    if i == j {
                        1.0
                    } else if a[[i, j]] != 0.0 {
                        -a[[i, j]] / (deg[i] * deg[j]).sqrt()
                    } else {
                        0.0
                    }
                }
            };
        }
    }
    l
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Node count and a raw (possibly duplicated, possibly self-looped) edge list.
pub fn arb_edge_list(max_nodes: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_nodes).prop_flat_map(|n| {
        let edges = proptest::collection::vec((0..n, 0..n), 0..=3 * n);
        (Just(n), edges)
    })
}
