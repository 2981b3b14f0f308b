//! Dense numerical kernels shared by the selectors and the classifier.

pub mod eigen;
pub mod knn;
pub mod laplacian;
pub mod lars;
pub mod matrix;

pub use eigen::{eigh_smallest, EigenPairs};
pub use knn::{knn_search, nearest, Edge, KnnGraph, Metric};
pub use laplacian::{graph_laplacian, LaplacianKind};
pub use lars::{lars_path, lars_trace, LarsPath, LarsStep};
pub use matrix::DenseMatrix;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("numerical failure: {0}")]
    Convergence(String),
}

/// Numerical tolerances used throughout the crate, in one place so tests
/// can tighten or relax them.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Allowed `|a_ij − a_ji|` relative to `max(1, max|a|)`.
    pub symmetry: f64,
    /// `‖Av − λv‖∞ ≤ eigen_residual · ‖A‖∞`.
    pub eigen_residual: f64,
    /// `|vᵀv − 1|` bound.
    pub eigen_norm: f64,
    /// `|vᵢᵀvⱼ|` bound for distinct pairs.
    pub eigen_orthogonality: f64,
    pub jacobi_max_sweeps: usize,
    /// LARS stops once every correlation magnitude is below this.
    pub lars_correlation: f64,
    /// Column norms / Cholesky pivots at or below this are degenerate.
    pub lars_degenerate: f64,
    /// Step lengths at or below this are ignored when searching the next
    /// breakpoint.
    pub lars_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-10,
            eigen_residual: 1e-8,
            eigen_norm: 1e-10,
            eigen_orthogonality: 1e-8,
            jacobi_max_sweeps: 100,
            lars_correlation: 1e-10,
            lars_degenerate: 1e-10,
            lars_step: 1e-14,
        }
    }
}
