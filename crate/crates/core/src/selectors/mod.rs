//! Unsupervised feature scoring.
//!
//! Every selector sees only the training feature matrix and returns a
//! [`FeatureRanking`]: one finite score per feature (higher is better) and
//! the induced order, ties going to the lower feature index.

mod external;
mod spectral;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{DenseMatrix, NumericsError};
use crate::rng::SplitMix64;

pub use external::read_score_file;
pub use spectral::{laplacian_score, mcfs, mcfs_many, SpectralEmbedding};

#[derive(Debug, Error)]
pub enum SelectorError {
    #[error("invalid selector configuration: {0}")]
    Config(String),
    #[error("score file {path}: {message}")]
    External { path: String, message: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Variance,
    LaplacianScore,
    Mcfs,
    Random,
    External,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Variance => "variance",
            Method::LaplacianScore => "laplacian_score",
            Method::Mcfs => "mcfs",
            Method::Random => "random",
            Method::External => "external",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = SelectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "variance" => Ok(Method::Variance),
            "laplacian_score" | "laplacian" | "ls" => Ok(Method::LaplacianScore),
            "mcfs" => Ok(Method::Mcfs),
            "random" => Ok(Method::Random),
            "external" => Ok(Method::External),
            other => Err(SelectorError::Config(format!("unknown method '{other}'"))),
        }
    }
}

fn default_graph_k() -> usize {
    5
}

fn default_clusters() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub method: Method,
    /// Neighbors in the selector graph (Laplacian Score, MCFS).
    #[serde(default = "default_graph_k")]
    pub graph_k: usize,
    /// Number of spectral embedding dimensions for MCFS.
    #[serde(default = "default_clusters")]
    pub mcfs_clusters: usize,
    /// Features per LARS regression in MCFS; `None` means the requested `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcfs_cardinality: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Score file for `external`; `{dataset}` is replaced by the dataset name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_path: Option<PathBuf>,
    /// Column name in reports; defaults to the method name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl SelectorConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            graph_k: default_graph_k(),
            mcfs_clusters: default_clusters(),
            mcfs_cardinality: None,
            seed: 0,
            external_path: None,
            name: None,
        }
    }

    pub fn external(path: impl Into<PathBuf>, name: impl Into<String>) -> Self {
        Self { external_path: Some(path.into()), name: Some(name.into()), ..Self::new(Method::External) }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.method.as_str().to_string())
    }

    pub fn validate(&self) -> Result<(), SelectorError> {
        if self.graph_k == 0 {
            return Err(SelectorError::Config("graph_k must be at least 1".into()));
        }
        if self.method == Method::Mcfs && self.mcfs_clusters < 2 {
            return Err(SelectorError::Config("MCFS needs at least 2 clusters".into()));
        }
        if self.mcfs_cardinality == Some(0) {
            return Err(SelectorError::Config("mcfs_cardinality must be at least 1".into()));
        }
        if self.method == Method::External && self.external_path.is_none() {
            return Err(SelectorError::Config("external method needs external_path".into()));
        }
        Ok(())
    }

    /// Substitutes `{dataset}` in the external score path.
    pub fn for_dataset(&self, dataset: &str) -> Self {
        let mut cfg = self.clone();
        if let Some(p) = &self.external_path {
            cfg.external_path = Some(PathBuf::from(p.to_string_lossy().replace("{dataset}", dataset)));
        }
        cfg
    }
}

/// Scores and the induced order of the features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub scores: Vec<f64>,
    /// Feature indices by descending score, ties by ascending index.
    pub order: Vec<usize>,
    pub method: String,
}

impl FeatureRanking {
    pub fn from_scores(scores: Vec<f64>, method: impl Into<String>) -> Result<Self, SelectorError> {
        if let Some(j) = scores.iter().position(|s| !s.is_finite()) {
            return Err(SelectorError::Config(format!("score of feature {j} is not finite")));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Ok(Self { scores, order, method: method.into() })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn top_d(&self, d: usize) -> Result<Vec<usize>, SelectorError> {
        top_d(self, d)
    }
}

/// The first `d` features of the ranking.
pub fn top_d(r: &FeatureRanking, d: usize) -> Result<Vec<usize>, SelectorError> {
    if d == 0 || d > r.len() {
        return Err(SelectorError::Config(format!("d = {d} is outside 1..={}", r.len())));
    }
    Ok(r.order[..d].to_vec())
}

/// Default feature count `min(⌈F/2⌉, 100)`.
pub fn default_d(n_features: usize) -> usize {
    n_features.div_ceil(2).clamp(1, 100)
}

pub fn variance_scores(x: &DenseMatrix) -> Vec<f64> {
    let n = x.rows() as f64;
    (0..x.cols())
        .map(|j| {
            let c = x.column(j);
            let mean = c.iter().sum::<f64>() / n;
            c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
        })
        .collect()
}

fn random_ranking(n_features: usize, seed: u64) -> Result<FeatureRanking, SelectorError> {
    let mut order: Vec<usize> = (0..n_features).collect();
    SplitMix64::new(seed).shuffle(&mut order);
    let mut scores = vec![0.0; n_features];
    for (pos, &j) in order.iter().enumerate() {
        scores[j] = (n_features - pos) as f64;
    }
    FeatureRanking::from_scores(scores, "random")
}

fn check_input(x: &DenseMatrix) -> Result<(), SelectorError> {
    if x.rows() < 2 {
        return Err(SelectorError::Config(format!("selectors need at least 2 rows, got {}", x.rows())));
    }
    if x.cols() == 0 {
        return Err(SelectorError::Config("matrix has no features".into()));
    }
    if !x.all_finite() {
        return Err(NumericsError::NonFinite.into());
    }
    Ok(())
}

/// Ranks the columns of `train_x`. MCFS without an explicit cardinality
/// uses [`default_d`].
pub fn select(train_x: &DenseMatrix, cfg: &SelectorConfig) -> Result<FeatureRanking, SelectorError> {
    let d = cfg.mcfs_cardinality.unwrap_or_else(|| default_d(train_x.cols()));
    Ok(select_many(train_x, cfg, &[d])?.pop().expect("one ranking per d"))
}

/// One ranking per requested `d`. Only MCFS depends on `d` (through the
/// LARS cardinality); its spectral embedding is computed once.
pub fn select_many(
    train_x: &DenseMatrix,
    cfg: &SelectorConfig,
    ds: &[usize],
) -> Result<Vec<FeatureRanking>, SelectorError> {
    cfg.validate()?;
    check_input(train_x)?;
    let label = cfg.label();
    let single = |r: FeatureRanking| Ok(vec![r; ds.len()]);
    let mut ranking = match cfg.method {
        Method::Variance => single(FeatureRanking::from_scores(variance_scores(train_x), "variance")?),
        Method::LaplacianScore => single(laplacian_score(train_x, cfg.graph_k)?),
        Method::Random => single(random_ranking(train_x.cols(), cfg.seed)?),
        Method::External => {
            let path = cfg.external_path.as_ref().expect("validated");
            let scores = read_score_file(path, train_x.cols())?;
            single(FeatureRanking::from_scores(scores, "external")?)
        }
        Method::Mcfs => {
            let cards: Vec<usize> = match cfg.mcfs_cardinality {
                Some(c) => vec![c; ds.len()],
                None => ds.to_vec(),
            };
            mcfs_many(train_x, cfg.graph_k, cfg.mcfs_clusters, &cards)
        }
    }?;
    for r in &mut ranking {
        r.method = label.clone();
    }
    Ok(ranking)
}
