use rayon::prelude::*;

use super::{FeatureRanking, SelectorError};
use crate::numerics::laplacian::DEGREE_FLOOR;
use crate::numerics::{
    eigh_smallest, graph_laplacian, knn_search, lars_trace, DenseMatrix, LaplacianKind, Metric, Tolerances,
};

/// Laplacian Score over a heat-kernel kNN graph, negated so that smoother
/// features score higher. Constant features get `f64::MIN`.
pub fn laplacian_score(x: &DenseMatrix, graph_k: usize) -> Result<FeatureRanking, SelectorError> {
    let g = knn_search(x, graph_k, Metric::Euclidean)?.with_heat_kernel().symmetrize();
    let deg = g.degrees();
    let total: f64 = deg.iter().sum();
    let scores = (0..x.cols())
        .map(|j| {
            let f = x.column(j);
            if f.iter().all(|&v| v == f[0]) {
                return f64::MIN;
            }
            let mean = f.iter().zip(&deg).map(|(v, d)| v * d).sum::<f64>() / total;
            let ft: Vec<f64> = f.iter().map(|v| v - mean).collect();
            let den: f64 = ft.iter().zip(&deg).map(|(v, d)| d * v * v).sum();
            // fᵀLf = ½ Σᵢ Σⱼ wᵢⱼ (fᵢ − fⱼ)² over the symmetric edge lists.
            let num: f64 = g
                .neighbors
                .iter()
                .enumerate()
                .map(|(i, list)| list.iter().map(|e| e.weight * (ft[i] - ft[e.node]).powi(2)).sum::<f64>())
                .sum::<f64>()
                / 2.0;
            if den > 0.0 {
                -(num / den)
            } else {
                f64::MIN
            }
        })
        .collect();
    FeatureRanking::from_scores(scores, "laplacian_score")
}

/// The K smallest non-trivial eigenvectors of the normalized Laplacian of a
/// binary kNN graph, mapped back by `D^{-1/2}` (the generalized problem
/// `Ly = λDy`). On a disconnected graph the trivial constant direction is
/// removed from the whole null space rather than from the first vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Projects the constant direction out of `D`-orthonormal vectors and
/// drops the vector it accounted for: the first near-zero residual of a
/// `D`-Gram-Schmidt pass in eigenvalue order, else the first vector.
/// Returns the kept indices and vectors.
fn drop_trivial_direction(vectors: Vec<Vec<f64>>, deg: &[f64]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let d: Vec<f64> = deg.iter().map(|v| v.max(DEGREE_FLOOR)).collect();
    let inner = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&d).map(|((x, y), w)| x * y * w).sum::<f64>();
    let total: f64 = d.iter().sum();
    let e = vec![1.0 / total.sqrt(); d.len()];
    let mut kept: Vec<(usize, Vec<f64>)> = Vec::with_capacity(vectors.len());
    let mut dropped = false;
    for (k, mut v) in vectors.into_iter().enumerate() {
        let c = inner(&v, &e);
        v.iter_mut().zip(&e).for_each(|(x, b)| *x -= c * b);
        for (_, q) in &kept {
            let c = inner(&v, q);
            v.iter_mut().zip(q).for_each(|(x, b)| *x -= c * b);
        }
        let norm = inner(&v, &v).sqrt();
        if !dropped && norm < 1e-6 {
            dropped = true;
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        kept.push((k, v));
    }
    if !dropped {
        kept.remove(0);
    }
    kept.into_iter().unzip()
}

impl SpectralEmbedding {
    pub fn compute(x: &DenseMatrix, graph_k: usize, clusters: usize) -> Result<Self, SelectorError> {
        let n = x.rows();
        if clusters + 1 > n {
            return Err(SelectorError::Config(format!(
                "MCFS with {clusters} clusters needs at least {} rows, got {n}",
                clusters + 1
            )));
        }
        let g = knn_search(x, graph_k, Metric::Euclidean)?.symmetrize();
        let deg = g.degrees();
        let (l, _) = graph_laplacian(&g, LaplacianKind::Normalized);
        let pairs = eigh_smallest(&l, clusters + 1)?;
        let back: Vec<Vec<f64>> = (0..=clusters)
            .map(|k| pairs.vector(k).iter().zip(&deg).map(|(z, d)| z / d.max(DEGREE_FLOOR).sqrt()).collect())
            .collect();
        let (kept, vectors) = drop_trivial_direction(back, &deg);
        Ok(Self { values: kept.iter().map(|&k| pairs.values[k]).collect(), vectors })
    }
    /// MCFS scores `max_k |a_kj|` for each LARS cardinality in `cards`.
    pub fn scores(&self, x: &DenseMatrix, cards: &[usize]) -> Result<Vec<Vec<f64>>, SelectorError> {
        let f = x.cols();
        let cards: Vec<usize> = cards.iter().map(|&c| c.clamp(1, f)).collect();
        let deepest = cards.iter().copied().max().unwrap_or(1);
        let tol = Tolerances::default();
        let paths = self.vectors.par_iter().map(|y| lars_trace(x, y, deepest, &tol)).collect::<Result<Vec<_>, _>>()?;
        Ok(cards
            .iter()
            .map(|&c| {
                let mut s = vec![0.0f64; f];
                for path in &paths {
                    for (j, a) in path.at_cardinality(c) {
                        s[j] = s[j].max(a.abs());
                    }
                }
                s
            })
            .collect())
    }
}

/// Multi-Cluster Feature Selection with `clusters` embedding dimensions and
/// `cardinality` features per sparse regression.
pub fn mcfs(
    x: &DenseMatrix,
    graph_k: usize,
    clusters: usize,
    cardinality: usize,
) -> Result<FeatureRanking, SelectorError> {
    Ok(mcfs_many(x, graph_k, clusters, &[cardinality])?.pop().expect("one ranking"))
}

/// [`mcfs`] for several cardinalities sharing one embedding.
pub fn mcfs_many(
    x: &DenseMatrix,
    graph_k: usize,
    clusters: usize,
    cards: &[usize],
) -> Result<Vec<FeatureRanking>, SelectorError> {
    let emb = SpectralEmbedding::compute(x, graph_k, clusters)?;
    emb.scores(x, cards)?.into_iter().map(|s| FeatureRanking::from_scores(s, "mcfs")).collect()
}
