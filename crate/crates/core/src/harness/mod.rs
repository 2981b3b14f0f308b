//! The evaluation protocol: repeated seeded hold-out splits over a
//! (dataset × method × repeat) grid, aggregation and rank tables.
//!
//! Seeds are derived per cell, never drawn from a shared stream:
//!
//! * split seed `derive_seed([master, fnv(dataset), repeat])`, shared by all
//!   methods so they are compared on identical folds;
//! * selector seed `derive_seed([master, fnv(dataset), fnv(method), repeat])`.
//!
//! Cells run in parallel and are merged in canonical order, so reports are
//! byte-identical for a given configuration.

mod config;
mod report;
mod study;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{self, holdout_split, minmax_normalize, DatasetError, MultiLabelDataset};
use crate::metrics::{self, average_rank, EvaluationResult, Measure, MetricsError};
use crate::mlknn::{self, MlknnError};
use crate::numerics::DenseMatrix;
use crate::rng::{derive_seed, fnv1a64};
use crate::selectors::{select_many, top_d, FeatureRanking, SelectorConfig, SelectorError};

pub use config::{DatasetFile, DatasetSources, ExperimentConfig, FeatureCount};
pub use report::{emit_report, render_report, ReportFormat};
pub use study::{majority_vote_knn, single_label_study, LabelRanking, StudyReport};

/// Version of the report JSON layout.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Selector(#[from] SelectorError),
    #[error(transparent)]
    Classifier(#[from] MlknnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("nothing to run: {0}")]
    EmptyGrid(String),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }
}

pub fn split_seed(master: u64, dataset: &str, repeat: usize) -> u64 {
    derive_seed(&[master, fnv1a64(dataset), repeat as u64])
}

pub fn selector_seed(master: u64, dataset: &str, method: &str, repeat: usize) -> u64 {
    derive_seed(&[master, fnv1a64(dataset), fnv1a64(method), repeat as u64])
}

/// What one grid cell saw, passed to the instrumentation hook.
pub struct CellTrace<'a> {
    pub dataset: &'a str,
    pub method: &'a str,
    pub repeat: usize,
    pub train_rows: &'a [usize],
    pub test_rows: &'a [usize],
    /// Normalized training features given to the selector.
    pub train_x: &'a DenseMatrix,
    /// One ranking per feature count of the dataset.
    pub rankings: &'a [FeatureRanking],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub instances: usize,
    pub features: usize,
    pub labels: usize,
    pub d_values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub dataset: String,
    pub method: String,
    pub repeat: usize,
    pub d: usize,
    pub split_seed: u64,
    pub selector_seed: u64,
    pub result: EvaluationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub dataset: String,
    pub method: String,
    pub d: usize,
    /// Position in the `d` sweep.
    pub d_index: usize,
    pub measure: Measure,
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single repeat.
    pub std: f64,
    pub n: usize,
}

/// Per-dataset means for one measure and sweep position, with the
/// resulting average ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub measure: Measure,
    pub d_index: usize,
    /// Requested `d`; `None` for the default rule.
    pub d_requested: Option<usize>,
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    /// `d` actually used per dataset.
    pub d_used: Vec<usize>,
    pub means: Vec<Vec<f64>>,
    pub stds: Vec<Vec<f64>>,
    pub average_rank: Vec<f64>,
    /// Datasets left out because some method has no result.
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: u32,
    pub config: ExperimentConfig,
    /// Protocol conventions in effect.
    pub decisions: BTreeMap<String, String>,
    pub datasets: Vec<DatasetSummary>,
    pub methods: Vec<String>,
    pub cells: Vec<CellResult>,
    pub summaries: Vec<Summary>,
    pub rank_tables: Vec<RankTable>,
    pub failures: Vec<Failure>,
}

impl ExperimentReport {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }

    pub fn summary(&self, dataset: &str, method: &str, d_index: usize, measure: Measure) -> Option<&Summary> {
        self.summaries
            .iter()
            .find(|s| s.dataset == dataset && s.method == method && s.d_index == d_index && s.measure == measure)
    }

    pub fn to_json(&self) -> Result<String, HarnessError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let r: Self = serde_json::from_str(text)?;
        if r.version != REPORT_VERSION {
            return Err(HarnessError::Config(format!("unsupported report version {}", r.version)));
        }
        Ok(r)
    }
}

fn decisions(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    let ties = match cfg.rank_ties {
        metrics::TieRule::Average => "average of tied positions",
        metrics::TieRule::Competition => "best tied position",
    };
    [
        (
            "classifier",
            format!("ML-kNN, k = {}, s = {}, leave-one-out training neighborhoods", cfg.knn_k, cfg.smoothing),
        ),
        ("posterior_tie", "posterior exactly 0.5 predicts 0".to_string()),
        ("one_error_tie", "argmax ties go to the lowest label index".to_string()),
        (
            "degenerate_instances",
            "skipped for one-error and ranking loss; empty/empty counts 1 for accuracy".to_string(),
        ),
        ("ranking_loss_ties", "tied scores count as misordered pairs".to_string()),
        (
            "preprocessing",
            "min-max on the training fold, missing values imputed with the training mean, test clamped to [0, 1]"
                .to_string(),
        ),
        (
            "split",
            format!(
                "{:.0}/{:.0} hold-out, {} independent repeats, split seed shared by all methods",
                cfg.train_fraction * 100.0,
                (1.0 - cfg.train_fraction) * 100.0,
                cfg.repeats
            ),
        ),
        ("feature_count", "min(ceil(F/2), 100) unless d is given; d above F is clamped".to_string()),
        ("std", "sample standard deviation (n - 1)".to_string()),
        ("rank_ties", ties.to_string()),
        ("feature_ties", "equal selector scores ordered by ascending feature index".to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Loads every configured dataset. Failures are returned alongside the
/// datasets that did load.
pub fn load_datasets(cfg: &ExperimentConfig) -> Result<(Vec<MultiLabelDataset>, Vec<Failure>), HarnessError> {
    let mut loaded = Vec::new();
    let mut failures = Vec::new();
    if let Some(manifest) = &cfg.datasets.manifest {
        let opts = dataset::FetchOptions::from_env(cfg.datasets.offline);
        for outcome in dataset::fetch_manifest(manifest, &opts)? {
            match outcome.result {
                Ok(ds) => loaded.push(ds),
                Err(e) => {
                    failures.push(Failure { dataset: outcome.name, method: None, repeat: None, message: e.to_string() })
                }
            }
        }
    }
    for f in &cfg.datasets.files {
        match dataset::load_arff_file(&f.path, &f.labels) {
            Ok(ds) => loaded.push(ds),
            Err(e) => failures.push(Failure {
                dataset: f.path.display().to_string(),
                method: None,
                repeat: None,
                message: e.to_string(),
            }),
        }
    }
    Ok((loaded, failures))
}

/// Loads the configured datasets and runs the grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let (datasets, failures) = load_datasets(cfg)?;
    for f in &failures {
        log::warn!("skipping dataset {}: {}", f.dataset, f.message);
    }
    let mut report = run_on_datasets(cfg, &datasets)?;
    report.failures.splice(0..0, failures);
    Ok(report)
}

pub fn run_on_datasets(
    cfg: &ExperimentConfig,
    datasets: &[MultiLabelDataset],
) -> Result<ExperimentReport, HarnessError> {
    run_on_datasets_with(cfg, datasets, &|_| {})
}

type CellOutput = Result<Vec<EvaluationResult>, HarnessError>;

/// Split, normalize and select for one cell; calls `hook` with the result.
pub(crate) fn run_cell_selection(
    cfg: &ExperimentConfig,
    ds: &MultiLabelDataset,
    ds_values: &[usize],
    method: &SelectorConfig,
    repeat: usize,
    hook: &(dyn Fn(&CellTrace) + Sync),
) -> Result<(MultiLabelDataset, MultiLabelDataset, Vec<FeatureRanking>), HarnessError> {
    let label = method.label();
    let split = holdout_split(ds, cfg.train_fraction, split_seed(cfg.master_seed, &ds.name, repeat))?;
    let (train, test) = minmax_normalize(&split.train, &split.test)?;
    let mut sel = method.for_dataset(&ds.name);
    sel.seed = derive_seed(&[selector_seed(cfg.master_seed, &ds.name, &label, repeat), method.seed]);
    let rankings = select_many(&train.x, &sel, ds_values)?;
    hook(&CellTrace {
        dataset: &ds.name,
        method: &label,
        repeat,
        train_rows: &split.train_rows,
        test_rows: &split.test_rows,
        train_x: &train.x,
        rankings: &rankings,
    });
    Ok((train, test, rankings))
}

fn run_cell(
    cfg: &ExperimentConfig,
    ds: &MultiLabelDataset,
    ds_values: &[usize],
    method: &SelectorConfig,
    repeat: usize,
    hook: &(dyn Fn(&CellTrace) + Sync),
) -> CellOutput {
    let (train, test, rankings) = run_cell_selection(cfg, ds, ds_values, method, repeat, hook)?;
    rankings
        .iter()
        .zip(ds_values)
        .map(|(r, &d)| {
            let idx = top_d(r, d)?;
            let model = mlknn::fit(&train.x.select_columns(&idx), &train.y, cfg.knn_k, cfg.smoothing)?;
            let (h, f) = model.predict_batch(&test.x.select_columns(&idx))?;
            Ok(metrics::evaluate(&h, &f, &test.y)?)
        })
        .collect()
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let ss = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Runs the grid on already-loaded datasets, calling `hook` once per
/// (dataset, method, repeat) cell after feature selection.
pub fn run_on_datasets_with(
    cfg: &ExperimentConfig,
    datasets: &[MultiLabelDataset],
    hook: &(dyn Fn(&CellTrace) + Sync),
) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    if datasets.is_empty() {
        return Err(HarnessError::EmptyGrid("no dataset could be loaded".into()));
    }
    let methods: Vec<String> = cfg.methods.iter().map(SelectorConfig::label).collect();
    let d_values: Vec<Vec<usize>> = datasets.iter().map(|ds| cfg.d_for(&ds.name, ds.n_features())).collect();

    let grid: Vec<(usize, usize, usize)> = (0..datasets.len())
        .flat_map(|di| (0..cfg.methods.len()).flat_map(move |mi| (0..cfg.repeats).map(move |r| (di, mi, r))))
        .collect();
    let outputs: Vec<CellOutput> = grid
        .par_iter()
        .map(|&(di, mi, r)| run_cell(cfg, &datasets[di], &d_values[di], &cfg.methods[mi], r, hook))
        .collect();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    // results[di][mi][pos] = evaluations over successful repeats
    let mut results: Vec<Vec<Vec<Vec<EvaluationResult>>>> =
        d_values.iter().map(|dv| vec![vec![Vec::new(); dv.len()]; methods.len()]).collect();
    for (&(di, mi, r), out) in grid.iter().zip(outputs) {
        let name = &datasets[di].name;
        match out {
            Ok(evals) => {
                for (pos, ev) in evals.into_iter().enumerate() {
                    cells.push(CellResult {
                        dataset: name.clone(),
                        method: methods[mi].clone(),
                        repeat: r,
                        d: d_values[di][pos],
                        split_seed: split_seed(cfg.master_seed, name, r),
                        selector_seed: selector_seed(cfg.master_seed, name, &methods[mi], r),
                        result: ev,
                    });
                    results[di][mi][pos].push(ev);
                }
            }
            Err(e) => {
                log::warn!("{name} / {} / repeat {r}: {e}", methods[mi]);
                failures.push(Failure {
                    dataset: name.clone(),
                    method: Some(methods[mi].clone()),
                    repeat: Some(r),
                    message: e.to_string(),
                });
            }
        }
    }

    let mut summaries = Vec::new();
    for (di, ds) in datasets.iter().enumerate() {
        for (mi, m) in methods.iter().enumerate() {
            for (pos, &d) in d_values[di].iter().enumerate() {
                let evals = &results[di][mi][pos];
                if evals.is_empty() {
                    continue;
                }
                for measure in Measure::ALL {
                    let v: Vec<f64> = evals.iter().map(|e| e.get(measure)).collect();
                    let (mean, std) = mean_std(&v);
                    summaries.push(Summary {
                        dataset: ds.name.clone(),
                        method: m.clone(),
                        d,
                        d_index: pos,
                        measure,
                        mean,
                        std,
                        n: v.len(),
                    });
                }
            }
        }
    }

    let mut rank_tables = Vec::new();
    for (pos, d_req) in cfg.d_requested().into_iter().enumerate() {
        for measure in Measure::ALL {
            let mut table = RankTable {
                measure,
                d_index: pos,
                d_requested: d_req,
                methods: methods.clone(),
                datasets: Vec::new(),
                d_used: Vec::new(),
                means: Vec::new(),
                stds: Vec::new(),
                average_rank: Vec::new(),
                excluded: Vec::new(),
            };
            for (di, ds) in datasets.iter().enumerate() {
                let row: Option<Vec<(f64, f64)>> = (0..methods.len())
                    .map(|mi| {
                        let evals = &results[di][mi][pos];
                        (!evals.is_empty()).then(|| mean_std(&evals.iter().map(|e| e.get(measure)).collect::<Vec<_>>()))
                    })
                    .collect();
                match row {
                    Some(row) => {
                        table.datasets.push(ds.name.clone());
                        table.d_used.push(d_values[di][pos]);
                        table.means.push(row.iter().map(|r| r.0).collect());
                        table.stds.push(row.iter().map(|r| r.1).collect());
                    }
                    None => table.excluded.push(ds.name.clone()),
                }
            }
            if !table.means.is_empty() {
                table.average_rank = average_rank(&table.means, measure.direction(), cfg.rank_ties)?;
            }
            rank_tables.push(table);
        }
    }

    Ok(ExperimentReport {
        version: REPORT_VERSION,
        config: cfg.clone(),
        decisions: decisions(cfg),
        datasets: datasets
            .iter()
            .zip(&d_values)
            .map(|(ds, dv)| DatasetSummary {
                name: ds.name.clone(),
                instances: ds.n_instances(),
                features: ds.n_features(),
                labels: ds.n_labels(),
                d_values: dv.clone(),
            })
            .collect(),
        methods,
        cells,
        summaries,
        rank_tables,
        failures,
    })
}
