//! ML-kNN: per-label MAP estimates from neighbor label counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabelMatrix;
use crate::numerics::{knn_search, nearest, DenseMatrix, Metric, NumericsError};

/// Format version of serialized models.
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MlknnError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("expected {expected} features, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("unsupported model version {0}")]
    Version(u32),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedMLkNN {
    pub version: u32,
    pub train_x: DenseMatrix,
    pub train_y: LabelMatrix,
    pub k: usize,
    pub s: f64,
    /// `P(H₁ˡ)` per label.
    pub prior: Vec<f64>,
    /// `P(Eⱼˡ | H₁ˡ)` for `j = 0..=k`, per label.
    pub cond1: Vec<Vec<f64>>,
    /// `P(Eⱼˡ | H₀ˡ)` for `j = 0..=k`, per label.
    pub cond0: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// `h(x)`: 1 where the posterior is strictly above 0.5.
    pub label_set: Vec<u8>,
    /// `f(x, l)`: posterior `P(H₁ˡ | Cₗ)`.
    pub scores: Vec<f64>,
}

/// Fits ML-kNN with leave-one-out neighborhoods inside the training set.
pub fn fit(train_x: &DenseMatrix, train_y: &LabelMatrix, k: usize, s: f64) -> Result<TrainedMLkNN, MlknnError> {
    let p = train_x.rows();
    if train_y.rows() != p {
        return Err(MlknnError::InvalidArgument(format!("X has {p} rows but Y has {}", train_y.rows())));
    }
    if k == 0 || k >= p {
        return Err(MlknnError::InvalidArgument(format!("k = {k} must be in 1..{p}")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(MlknnError::InvalidArgument(format!("smoothing s = {s} must be positive")));
    }
    let q = train_y.cols();
    let graph = knn_search(train_x, k, Metric::Euclidean)?;

    let mut c1 = vec![vec![0u64; k + 1]; q];
    let mut c0 = vec![vec![0u64; k + 1]; q];
    let mut present = vec![0u64; q];
    for (i, nbrs) in graph.neighbors.iter().enumerate() {
        for l in 0..q {
            let c = nbrs.iter().filter(|e| train_y.get(e.node, l) == 1).count();
            if train_y.get(i, l) == 1 {
                present[l] += 1;
                c1[l][c] += 1;
            } else {
                c0[l][c] += 1;
            }
        }
    }
    let prior = present.iter().map(|&n| (s + n as f64) / (2.0 * s + p as f64)).collect();
    let smooth = |counts: &Vec<u64>| {
        let total = counts.iter().sum::<u64>() as f64;
        counts.iter().map(|&c| (s + c as f64) / (s * (k + 1) as f64 + total)).collect()
    };
    Ok(TrainedMLkNN {
        version: MODEL_VERSION,
        train_x: train_x.clone(),
        train_y: train_y.clone(),
        k,
        s,
        prior,
        cond1: c1.iter().map(smooth).collect(),
        cond0: c0.iter().map(smooth).collect(),
    })
}

impl TrainedMLkNN {
    pub fn n_features(&self) -> usize {
        self.train_x.cols()
    }

    pub fn n_labels(&self) -> usize {
        self.train_y.cols()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction, MlknnError> {
        if x.len() != self.n_features() {
            return Err(MlknnError::Arity { expected: self.n_features(), actual: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite.into());
        }
        let nbrs = nearest(&self.train_x, x, self.k, None);
        let q = self.n_labels();
        let mut label_set = vec![0u8; q];
        let mut scores = vec![0.0; q];
        for l in 0..q {
            let c = nbrs.iter().filter(|(i, _)| self.train_y.get(*i, l) == 1).count();
            let a = self.prior[l] * self.cond1[l][c];
            let b = (1.0 - self.prior[l]) * self.cond0[l][c];
            scores[l] = a / (a + b);
            label_set[l] = u8::from(scores[l] > 0.5);
        }
        Ok(Prediction { label_set, scores })
    }

    /// Predicts every row of `x`; returns `h` as a label matrix and `f` as a
    /// score matrix.
    pub fn predict_batch(&self, x: &DenseMatrix) -> Result<(LabelMatrix, DenseMatrix), MlknnError> {
        let preds = (0..x.rows()).into_par_iter().map(|i| self.predict(x.row(i))).collect::<Result<Vec<_>, _>>()?;
        let q = self.n_labels();
        let mut h = Vec::with_capacity(preds.len() * q);
        let mut f = Vec::with_capacity(preds.len() * q);
        for p in preds {
            h.extend(p.label_set);
            f.extend(p.scores);
        }
        let h = LabelMatrix::new(x.rows(), q, h).expect("binary by construction");
        Ok((h, DenseMatrix::new(x.rows(), q, f)?))
    }

    pub fn to_json(&self) -> Result<String, MlknnError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, MlknnError> {
        let m: Self = serde_json::from_str(text)?;
        if m.version != MODEL_VERSION {
            return Err(MlknnError::Version(m.version));
        }
        Ok(m)
    }
}
