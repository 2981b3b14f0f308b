//! Multi-label datasets: parsing, validation, preprocessing and splitting.

pub mod arff;
pub mod fetch;
pub mod labels;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::DenseMatrix;
use crate::rng::SplitMix64;

pub use arff::{parse_arff, to_arff};
pub use fetch::{fetch_manifest, load_arff_file, FetchOptions, FetchOutcome, Manifest, ManifestEntry, ManifestLabels};
pub use labels::{parse_label_xml, LabelSpec};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("label XML: {0}")]
    LabelXml(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("download of {url} failed: {message}")]
    Network { url: String, message: String },
    #[error("checksum mismatch for {name}: expected {expected}, got {actual}")]
    Checksum { name: String, expected: String, actual: String },
    #[error("{0} is not in the cache and offline mode is on")]
    NotCached(String),
}

pub(crate) fn io_err(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> DatasetError {
    let path = path.as_ref().display().to_string();
    move |source| DatasetError::Io { path, source }
}

/// Binary matrix stored row-major as `u8` (0 or 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl LabelMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self, DatasetError> {
        if rows * cols != data.len() {
            return Err(DatasetError::Invalid(format!(
                "{rows}x{cols} label matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|&&v| v > 1) {
            return Err(DatasetError::Invalid(format!("label entries must be 0 or 1, found {v}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, DatasetError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(DatasetError::Invalid("ragged label rows".into()));
            }
            data.extend_from_slice(r.as_ref());
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = u8::from(v);
    }

    pub fn column(&self, j: usize) -> Vec<u8> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for i in 0..self.rows {
            let row = self.row(i);
            data.extend(idx.iter().map(|&j| row[j]));
        }
        Self { rows: self.rows, cols: idx.len(), data }
    }
}

/// Dense features `x` (p×F) with binary labels `y` (p×q).
///
/// Missing feature values (`?` in ARFF) are held as NaN until
/// [`minmax_normalize`] imputes them from the training fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLabelDataset {
    pub name: String,
    pub x: DenseMatrix,
    pub y: LabelMatrix,
    pub feature_names: Vec<String>,
    pub label_names: Vec<String>,
}

impl MultiLabelDataset {
    pub fn new(
        name: impl Into<String>,
        x: DenseMatrix,
        y: LabelMatrix,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let ds = Self { name: name.into(), x, y, feature_names, label_names };
        ds.validate()?;
        Ok(ds)
    }

    /// Builds a dataset with generated feature/label names.
    pub fn unnamed(name: impl Into<String>, x: DenseMatrix, y: LabelMatrix) -> Result<Self, DatasetError> {
        let feature_names = (0..x.cols()).map(|j| format!("f{j}")).collect();
        let label_names = (0..y.cols()).map(|j| format!("l{j}")).collect();
        Self::new(name, x, y, feature_names, label_names)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let p = self.x.rows();
        if p == 0 {
            return Err(DatasetError::Invalid("dataset has no instances".into()));
        }
        if self.y.rows() != p {
            return Err(DatasetError::Invalid(format!("X has {p} rows but Y has {}", self.y.rows())));
        }
        if self.x.cols() == 0 {
            return Err(DatasetError::Invalid("dataset has no features".into()));
        }
        if self.y.cols() < 2 {
            return Err(DatasetError::Invalid(format!(
                "a multi-label dataset needs at least 2 labels, got {}",
                self.y.cols()
            )));
        }
        if self.feature_names.len() != self.x.cols() || self.label_names.len() != self.y.cols() {
            return Err(DatasetError::Invalid("name lists do not match matrix shapes".into()));
        }
        if self.x.as_slice().iter().any(|v| v.is_infinite()) {
            return Err(DatasetError::Invalid("features contain infinite values".into()));
        }
        for j in 0..self.x.cols() {
            if (0..p).all(|i| self.x[(i, j)].is_nan()) {
                return Err(DatasetError::Invalid(format!(
                    "feature '{}' has no observed values",
                    self.feature_names[j]
                )));
            }
        }
        Ok(())
    }

    pub fn n_instances(&self) -> usize {
        self.x.rows()
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn n_labels(&self) -> usize {
        self.y.cols()
    }

    pub fn has_missing(&self) -> bool {
        self.x.as_slice().iter().any(|v| v.is_nan())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            x: self.x.select_rows(idx),
            y: self.y.select_rows(idx),
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
        }
    }

    /// Restricts the feature columns to `idx`, in the given order.
    pub fn select_features(&self, idx: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            x: self.x.select_columns(idx),
            y: self.y.clone(),
            feature_names: idx.iter().map(|&j| self.feature_names[j].clone()).collect(),
            label_names: self.label_names.clone(),
        }
    }

    /// Same features with a replacement label matrix.
    pub fn with_labels(&self, y: LabelMatrix, label_names: Vec<String>) -> Result<Self, DatasetError> {
        Self::new(self.name.clone(), self.x.clone(), y, self.feature_names.clone(), label_names)
    }
}

/// Train/test partition of a parent dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub train: MultiLabelDataset,
    pub test: MultiLabelDataset,
    pub seed: u64,
    /// Parent row indices of each fold, ascending.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

/// Seeded hold-out split: a SplitMix64 Fisher-Yates shuffle of the row
/// indices, the first `floor(train_fraction · p)` going to training.
/// Both folds keep parent row order.
pub fn holdout_split(d: &MultiLabelDataset, train_fraction: f64, seed: u64) -> Result<SplitPair, DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::Invalid(format!("train fraction {train_fraction} is not in (0, 1)")));
    }
    let p = d.n_instances();
    if p < 5 {
        return Err(DatasetError::Invalid(format!("hold-out split needs at least 5 instances, got {p}")));
    }
    let n_train = (train_fraction * p as f64).floor() as usize;
    if n_train == 0 || n_train >= p {
        return Err(DatasetError::Invalid(format!("fraction {train_fraction} of {p} instances leaves an empty fold")));
    }
    let mut idx: Vec<usize> = (0..p).collect();
    SplitMix64::new(seed).shuffle(&mut idx);
    let mut train_rows = idx[..n_train].to_vec();
    let mut test_rows = idx[n_train..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok(SplitPair { train: d.select_rows(&train_rows), test: d.select_rows(&test_rows), seed, train_rows, test_rows })
}

/// Min-max scaling fitted on `train` only.
///
/// Missing values are first imputed with the training column mean. Each
/// column is mapped by `(x − min) / (max − min)`; constant training columns
/// map to 0 and test values are clamped to `[0, 1]`.
pub fn minmax_normalize(
    train: &MultiLabelDataset,
    test: &MultiLabelDataset,
) -> Result<(MultiLabelDataset, MultiLabelDataset), DatasetError> {
    let f = train.n_features();
    if test.n_features() != f {
        return Err(DatasetError::Invalid(format!("train has {f} features but test has {}", test.n_features())));
    }
    let mut tr = train.clone();
    let mut te = test.clone();
    for j in 0..f {
        let observed: Vec<f64> = (0..tr.x.rows()).map(|i| tr.x[(i, j)]).filter(|v| !v.is_nan()).collect();
        let mean = if observed.is_empty() { 0.0 } else { observed.iter().sum::<f64>() / observed.len() as f64 };
        let (lo, hi) = observed.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let range = hi - lo;
        let scale = |v: f64, clamp: bool| {
            let v = if v.is_nan() { mean } else { v };
            if range.is_nan() || range <= 0.0 {
                0.0
            } else {
                let s = (v - lo) / range;
                if clamp {
                    s.clamp(0.0, 1.0)
                } else {
                    s
                }
            }
        };
        for i in 0..tr.x.rows() {
            tr.x[(i, j)] = scale(tr.x[(i, j)], false);
        }
        for i in 0..te.x.rows() {
            te.x[(i, j)] = scale(te.x[(i, j)], true);
        }
    }
    Ok((tr, te))
}

/// Conventional single-label dataset obtained by keeping one label column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleLabelDataset {
    pub x: DenseMatrix,
    pub y: Vec<u8>,
    pub source_label: usize,
}

pub fn instantiate_single_label(d: &MultiLabelDataset, label: usize) -> Result<SingleLabelDataset, DatasetError> {
    if label >= d.n_labels() {
        return Err(DatasetError::Invalid(format!("label index {label} out of range for {} labels", d.n_labels())));
    }
    Ok(SingleLabelDataset { x: d.x.clone(), y: d.y.column(label), source_label: label })
}
