use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{squared_distance, DenseMatrix};
use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
}

/// One directed edge of a neighbor graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub node: usize,
    /// Squared Euclidean distance between the endpoints.
    pub dist2: f64,
    pub weight: f64,
}

/// k-nearest-neighbor graph over the rows of a matrix.
///
/// `neighbors[i]` holds the outgoing edges of node `i`, sorted by
/// `(dist2, node)`. After [`KnnGraph::symmetrize`] the lists hold the
/// union of both directions and `W = Wᵀ` holds with `W ← max(W, Wᵀ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnGraph {
    pub n: usize,
    pub neighbors: Vec<Vec<Edge>>,
    pub symmetric: bool,
}

fn by_distance_then_index(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then(a.0.cmp(&b.0))
}

/// The `k` rows of `points` nearest to `query` as `(row, squared distance)`,
/// ascending by distance with ties going to the lower row index.
/// `exclude` removes one row (the query itself for leave-one-out searches).
pub fn nearest(points: &DenseMatrix, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<(usize, f64)> {
    let mut cand: Vec<(usize, f64)> = (0..points.rows())
        .filter(|&i| Some(i) != exclude)
        .map(|i| (i, squared_distance(points.row(i), query)))
        .collect();
    let k = k.min(cand.len());
    if k == 0 {
        return Vec::new();
    }
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, by_distance_then_index);
        cand.truncate(k);
    }
    cand.sort_unstable_by(by_distance_then_index);
    cand
}

/// Exact brute-force kNN over the rows of `x`, self excluded.
/// Edges carry unit weight; see [`KnnGraph::with_heat_kernel`].
pub fn knn_search(x: &DenseMatrix, k: usize, metric: Metric) -> Result<KnnGraph, NumericsError> {
    let Metric::Euclidean = metric;
    let n = x.rows();
    if k >= n {
        return Err(NumericsError::InvalidArgument(format!("k = {k} must be smaller than the number of points ({n})")));
    }
    if !x.all_finite() {
        return Err(NumericsError::NonFinite);
    }
    let neighbors = (0..n)
        .into_par_iter()
        .map(|i| {
            nearest(x, x.row(i), k, Some(i))
                .into_iter()
                .map(|(node, dist2)| Edge { node, dist2, weight: 1.0 })
                .collect()
        })
        .collect();
    Ok(KnnGraph { n, neighbors, symmetric: false })
}

impl KnnGraph {
    /// Reweights edges with `exp(−d²/σ²)`, σ² being the mean squared
    /// distance over all directed edges (1 when that mean is zero).
    pub fn with_heat_kernel(mut self) -> Self {
        let (sum, count) = self.neighbors.iter().flatten().fold((0.0, 0usize), |(s, c), e| (s + e.dist2, c + 1));
        let mut sigma2 = if count > 0 { sum / count as f64 } else { 0.0 };
        if sigma2 <= 0.0 {
            sigma2 = 1.0;
        }
        for e in self.neighbors.iter_mut().flatten() {
            // Duplicate points give weight exp(0) = 1, so weights stay positive.
            e.weight = (-e.dist2 / sigma2).exp().max(f64::MIN_POSITIVE);
        }
        self
    }

    /// Makes the edge set symmetric with `W ← max(W, Wᵀ)`.
    pub fn symmetrize(self) -> Self {
        if self.symmetric {
            return self;
        }
        let mut merged: Vec<Vec<Edge>> = vec![Vec::new(); self.n];
        for (i, list) in self.neighbors.iter().enumerate() {
            for e in list {
                merged[i].push(*e);
                merged[e.node].push(Edge { node: i, ..*e });
            }
        }
        for list in &mut merged {
            list.sort_by(|a, b| a.node.cmp(&b.node).then(b.weight.total_cmp(&a.weight)));
            list.dedup_by_key(|e| e.node);
            list.sort_by(|a, b| a.dist2.total_cmp(&b.dist2).then(a.node.cmp(&b.node)));
        }
        Self { n: self.n, neighbors: merged, symmetric: true }
    }

    pub fn adjacency(&self) -> DenseMatrix {
        let mut w = DenseMatrix::zeros(self.n, self.n);
        for (i, list) in self.neighbors.iter().enumerate() {
            for e in list {
                let cur = w[(i, e.node)];
                w[(i, e.node)] = cur.max(e.weight);
            }
        }
        w
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.neighbors.iter().map(|l| l.iter().map(|e| e.weight).sum()).collect()
    }
}
