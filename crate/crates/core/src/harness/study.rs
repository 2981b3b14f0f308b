use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_cell_selection, ExperimentConfig, HarnessError};
use crate::dataset::MultiLabelDataset;
use crate::metrics::{kendall_tau, ml_accuracy, rank_values, single_label_accuracy, Direction};
use crate::mlknn;
use crate::numerics::{nearest, DenseMatrix};
use crate::selectors::top_d;

/// Method accuracies and ranks for one evaluation target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRanking {
    /// Label name, or `"multi-label"` for the ML-kNN accuracy ranking.
    pub target: String,
    /// Mean accuracy per method over repeats.
    pub accuracy: Vec<f64>,
    /// Rank per method (1 = best).
    pub ranks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub dataset: String,
    pub methods: Vec<String>,
    pub d: usize,
    pub repeats: usize,
    pub per_label: Vec<LabelRanking>,
    pub multi_label: LabelRanking,
    /// Kendall tau-b between every pair of per-label rankings (q × q).
    pub pairwise_tau: Vec<Vec<f64>>,
    pub min_pairwise_tau: f64,
    /// Kendall tau-b between each per-label ranking and the multi-label one.
    pub tau_vs_multi_label: Vec<f64>,
}

/// Majority vote among the `k` nearest training rows; an even split
/// predicts class 0.
pub fn majority_vote_knn(train_x: &DenseMatrix, train_y: &[u8], test_x: &DenseMatrix, k: usize) -> Vec<u8> {
    (0..test_x.rows())
        .map(|i| {
            let nbrs = nearest(train_x, test_x.row(i), k, None);
            let ones = nbrs.iter().filter(|(j, _)| train_y[*j] == 1).count();
            u8::from(2 * ones > nbrs.len())
        })
        .collect()
}

/// Compares method rankings across the single-label instantiations of one
/// dataset. Uses the first configured feature count.
pub fn single_label_study(cfg: &ExperimentConfig, ds: &MultiLabelDataset) -> Result<StudyReport, HarnessError> {
    cfg.validate()?;
    let q = ds.n_labels();
    let m = cfg.methods.len();
    if m < 2 {
        return Err(HarnessError::Config("a ranking study needs at least 2 methods".into()));
    }
    if q < 3 {
        log::warn!("{}: only {q} labels; rank comparisons will be thin", ds.name);
    }
    let d = cfg.d_for(&ds.name, ds.n_features())[0];
    let grid: Vec<(usize, usize)> = (0..m).flat_map(|mi| (0..cfg.repeats).map(move |r| (mi, r))).collect();

    // (multi-label accuracy, per-label single-label accuracy)
    let outputs = grid
        .par_iter()
        .map(|&(mi, r)| -> Result<(f64, Vec<f64>), HarnessError> {
            let (train, test, rankings) = run_cell_selection(cfg, ds, &[d], &cfg.methods[mi], r, &|_| {})?;
            let idx = top_d(&rankings[0], d)?;
            let xtr = train.x.select_columns(&idx);
            let xte = test.x.select_columns(&idx);
            let model = mlknn::fit(&xtr, &train.y, cfg.knn_k, cfg.smoothing)?;
            let (h, _) = model.predict_batch(&xte)?;
            let ml = ml_accuracy(&h, &test.y)?;
            let per_label = (0..q)
                .map(|l| {
                    let pred = majority_vote_knn(&xtr, &train.y.column(l), &xte, cfg.knn_k);
                    single_label_accuracy(&pred, &test.y.column(l))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((ml, per_label))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let reps = cfg.repeats as f64;
    let mut ml_acc = vec![0.0; m];
    let mut sl_acc = vec![vec![0.0; m]; q];
    for (&(mi, _), (ml, per_label)) in grid.iter().zip(&outputs) {
        ml_acc[mi] += ml / reps;
        for l in 0..q {
            sl_acc[l][mi] += per_label[l] / reps;
        }
    }
    let ranking = |target: String, accuracy: Vec<f64>| {
        let ranks = rank_values(&accuracy, Direction::HigherBetter, cfg.rank_ties);
        LabelRanking { target, accuracy, ranks }
    };
    let per_label: Vec<LabelRanking> =
        sl_acc.into_iter().enumerate().map(|(l, acc)| ranking(ds.label_names[l].clone(), acc)).collect();
    let multi_label = ranking("multi-label".into(), ml_acc);

    let mut pairwise_tau = vec![vec![1.0; q]; q];
    let mut min_pairwise_tau = 1.0f64;
    for a in 0..q {
        for b in a + 1..q {
            let t = kendall_tau(&per_label[a].ranks, &per_label[b].ranks)?;
            pairwise_tau[a][b] = t;
            pairwise_tau[b][a] = t;
            min_pairwise_tau = min_pairwise_tau.min(t);
        }
    }
    let tau_vs_multi_label =
        per_label.iter().map(|p| kendall_tau(&p.ranks, &multi_label.ranks)).collect::<Result<Vec<_>, _>>()?;

    Ok(StudyReport {
        dataset: ds.name.clone(),
        methods: cfg.methods.iter().map(|c| c.label()).collect(),
        d,
        repeats: cfg.repeats,
        per_label,
        multi_label,
        pairwise_tau,
        min_pairwise_tau,
        tau_vs_multi_label,
    })
}
