use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::dataset::ManifestLabels;
use crate::metrics::TieRule;
use crate::selectors::{default_d, SelectorConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub path: PathBuf,
    pub labels: ManifestLabels,
}

/// Where datasets come from: a download manifest, local files, or both.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSources {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    /// Use only the download cache for manifest entries.
    #[serde(default)]
    pub offline: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<DatasetFile>,
}

/// Number of selected features: one value or a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureCount {
    One(usize),
    Sweep(Vec<usize>),
}

fn default_repeats() -> usize {
    10
}

fn default_train_fraction() -> f64 {
    0.8
}

fn default_knn_k() -> usize {
    10
}

fn default_smoothing() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub datasets: DatasetSources,
    pub methods: Vec<SelectorConfig>,
    /// `None` selects `min(⌈F/2⌉, 100)` per dataset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<FeatureCount>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_knn_k")]
    pub knn_k: usize,
    #[serde(default = "default_smoothing")]
    pub smoothing: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub rank_ties: TieRule,
}

impl ExperimentConfig {
    pub fn new(methods: Vec<SelectorConfig>) -> Self {
        Self {
            datasets: DatasetSources::default(),
            methods,
            d: None,
            repeats: default_repeats(),
            train_fraction: default_train_fraction(),
            knn_k: default_knn_k(),
            smoothing: default_smoothing(),
            master_seed: 0,
            output_dir: None,
            rank_ties: TieRule::Average,
        }
    }

    /// Reads a JSON config; relative dataset and score-file paths are
    /// resolved against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg: Self =
            serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(m) = cfg.datasets.manifest.as_mut() {
            rebase(m);
        }
        for f in &mut cfg.datasets.files {
            rebase(&mut f.path);
        }
        for m in &mut cfg.methods {
            if let Some(p) = m.external_path.as_mut() {
                rebase(p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.methods.is_empty() {
            return bad("no methods configured".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!("train_fraction {} is not in (0, 1)", self.train_fraction));
        }
        if self.knn_k == 0 {
            return bad("knn_k must be at least 1".into());
        }
        if !(self.smoothing > 0.0 && self.smoothing.is_finite()) {
            return bad(format!("smoothing {} must be positive", self.smoothing));
        }
        match &self.d {
            Some(FeatureCount::One(0)) => return bad("d must be at least 1".into()),
            Some(FeatureCount::Sweep(v)) if v.is_empty() || v.contains(&0) => {
                return bad("d sweep must be non-empty with entries ≥ 1".into())
            }
            _ => {}
        }
        let mut seen = HashSet::new();
        for m in &self.methods {
            m.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
            if !seen.insert(m.label()) {
                return bad(format!("duplicate method name '{}'", m.label()));
            }
        }
        Ok(())
    }

    /// Requested feature counts, `None` standing for the default rule.
    pub fn d_requested(&self) -> Vec<Option<usize>> {
        match &self.d {
            None => vec![None],
            Some(FeatureCount::One(d)) => vec![Some(*d)],
            Some(FeatureCount::Sweep(v)) => v.iter().map(|&d| Some(d)).collect(),
        }
    }

    /// Feature counts for a dataset with `f` features, clamped to `f`.
    pub fn d_for(&self, dataset: &str, f: usize) -> Vec<usize> {
        self.d_requested()
            .into_iter()
            .map(|d| match d {
                None => default_d(f),
                Some(d) if d > f => {
                    log::warn!("{dataset}: d = {d} exceeds {f} features; using {f}");
                    f
                }
                Some(d) => d,
            })
            .collect()
    }
}
