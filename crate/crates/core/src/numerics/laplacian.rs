use serde::{Deserialize, Serialize};

use super::knn::KnnGraph;
use super::matrix::DenseMatrix;

/// Degree floor used by the normalized Laplacian for isolated nodes.
pub const DEGREE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianKind {
    Unnormalized,
    Normalized,
}

/// Returns `(L, D)` for the graph. `L = D − W`, or `D^{-1/2}(D − W)D^{-1/2}`
/// for [`LaplacianKind::Normalized`]. A non-symmetric graph is symmetrized
/// first.
pub fn graph_laplacian(g: &KnnGraph, kind: LaplacianKind) -> (DenseMatrix, DenseMatrix) {
    let sym;
    let g = if g.symmetric {
        g
    } else {
        sym = g.clone().symmetrize();
        &sym
    };
    let w = g.adjacency();
    let n = g.n;
    let deg: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] = if i == j { deg[i] - w[(i, i)] } else { -w[(i, j)] };
        }
    }
    if kind == LaplacianKind::Normalized {
        let inv_sqrt: Vec<f64> = deg.iter().map(|&d| 1.0 / d.max(DEGREE_FLOOR).sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                // (s_i s_j) keeps the product order symmetric in (i, j).
                l[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
            }
        }
    }
    (l, DenseMatrix::from_diagonal(&deg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::knn::Edge;

    fn two_nodes() -> KnnGraph {
        KnnGraph {
            n: 2,
            neighbors: vec![
                vec![Edge { node: 1, dist2: 1.0, weight: 1.0 }],
                vec![Edge { node: 0, dist2: 1.0, weight: 1.0 }],
            ],
            symmetric: true,
        }
    }

    #[test]
    fn two_node_laplacian() {
        let (l, d) = graph_laplacian(&two_nodes(), LaplacianKind::Unnormalized);
        assert_eq!(l.as_slice(), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(d.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        let (ln, _) = graph_laplacian(&two_nodes(), LaplacianKind::Normalized);
        assert_eq!(ln.as_slice(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn isolated_node_is_floored() {
        let g = KnnGraph { n: 1, neighbors: vec![vec![]], symmetric: true };
        let (l, _) = graph_laplacian(&g, LaplacianKind::Normalized);
        assert_eq!(l.as_slice(), &[0.0]);
    }
}
