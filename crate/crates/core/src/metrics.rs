//! Multi-label evaluation measures, single-label accuracy and rank
//! aggregation.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::LabelMatrix;
use crate::numerics::DenseMatrix;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{0} is undefined: every instance was skipped")]
    Undefined(&'static str),
    #[error("empty input")]
    Empty,
    #[error("missing value for dataset {dataset}, method {method}")]
    MissingCell { dataset: usize, method: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    HammingLoss,
    RankingLoss,
    OneError,
    MlAccuracy,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::MlAccuracy, Measure::HammingLoss, Measure::RankingLoss, Measure::OneError];

    pub fn direction(self) -> Direction {
        match self {
            Measure::MlAccuracy => Direction::HigherBetter,
            _ => Direction::LowerBetter,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::HammingLoss => "hamming_loss",
            Measure::RankingLoss => "ranking_loss",
            Measure::OneError => "one_error",
            Measure::MlAccuracy => "ml_accuracy",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Measure::HammingLoss => "Hamming Loss",
            Measure::RankingLoss => "Ranking Loss",
            Measure::OneError => "One-Error",
            Measure::MlAccuracy => "Multi-Label Accuracy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBetter,
    HigherBetter,
}

/// How exact ties share rank positions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    /// Tied entries get the mean of their positions (1, 2.5, 2.5, 4).
    #[default]
    Average,
    /// Tied entries all get the best position (1, 2, 2, 4).
    Competition,
}

/// A measure value with the number of instances it left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub value: f64,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkippedInstances {
    pub one_error: usize,
    pub ranking_loss: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub hamming_loss: f64,
    pub ranking_loss: f64,
    pub one_error: f64,
    pub ml_accuracy: f64,
    pub skipped: SkippedInstances,
}

impl EvaluationResult {
    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::HammingLoss => self.hamming_loss,
            Measure::RankingLoss => self.ranking_loss,
            Measure::OneError => self.one_error,
            Measure::MlAccuracy => self.ml_accuracy,
        }
    }
}

fn same_shape(a: (usize, usize), b: (usize, usize)) -> Result<(), MetricsError> {
    if a != b {
        return Err(MetricsError::Shape(format!("{}x{} vs {}x{}", a.0, a.1, b.0, b.1)));
    }
    if a.0 == 0 || a.1 == 0 {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

fn label_shape(m: &LabelMatrix) -> (usize, usize) {
    (m.rows(), m.cols())
}

pub fn hamming_loss(preds: &LabelMatrix, truth: &LabelMatrix) -> Result<f64, MetricsError> {
    same_shape(label_shape(preds), label_shape(truth))?;
    let (p, q) = label_shape(truth);
    let total: f64 = (0..p)
        .map(|i| {
            let diff = preds.row(i).iter().zip(truth.row(i)).filter(|(a, b)| a != b).count();
            diff as f64 / q as f64
        })
        .sum();
    Ok(total / p as f64)
}

/// Index of the largest score, ties to the lowest index.
fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Fraction of instances whose top-scored label is not relevant. Instances
/// with no relevant label are skipped.
pub fn one_error(scores: &DenseMatrix, truth: &LabelMatrix) -> Result<Scored, MetricsError> {
    same_shape(scores.shape(), label_shape(truth))?;
    let (mut errors, mut used, mut skipped) = (0usize, 0usize, 0usize);
    for i in 0..truth.rows() {
        let y = truth.row(i);
        if y.iter().all(|&v| v == 0) {
            skipped += 1;
            continue;
        }
        used += 1;
        if y[argmax(scores.row(i))] == 0 {
            errors += 1;
        }
    }
    if used == 0 {
        return Err(MetricsError::Undefined("one-error"));
    }
    Ok(Scored { value: errors as f64 / used as f64, skipped })
}

/// Mean fraction of (relevant, irrelevant) label pairs with
/// `f(relevant) ≤ f(irrelevant)`. Instances whose relevant or irrelevant
/// set is empty are skipped.
pub fn ranking_loss(scores: &DenseMatrix, truth: &LabelMatrix) -> Result<Scored, MetricsError> {
    same_shape(scores.shape(), label_shape(truth))?;
    let (mut total, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for i in 0..truth.rows() {
        let y = truth.row(i);
        let f = scores.row(i);
        let pos: Vec<f64> = (0..y.len()).filter(|&l| y[l] == 1).map(|l| f[l]).collect();
        let neg: Vec<f64> = (0..y.len()).filter(|&l| y[l] == 0).map(|l| f[l]).collect();
        if pos.is_empty() || neg.is_empty() {
            skipped += 1;
            continue;
        }
        let bad = pos.iter().map(|a| neg.iter().filter(|&b| a <= b).count()).sum::<usize>();
        total += bad as f64 / (pos.len() * neg.len()) as f64;
        used += 1;
    }
    if used == 0 {
        return Err(MetricsError::Undefined("ranking loss"));
    }
    Ok(Scored { value: total / used as f64, skipped })
}

/// Mean Jaccard similarity of predicted and true label sets; two empty
/// sets count as a perfect match.
pub fn ml_accuracy(preds: &LabelMatrix, truth: &LabelMatrix) -> Result<f64, MetricsError> {
    same_shape(label_shape(preds), label_shape(truth))?;
    let p = truth.rows();
    let total: f64 = (0..p)
        .map(|i| {
            let (mut inter, mut union) = (0usize, 0usize);
            for (&a, &b) in preds.row(i).iter().zip(truth.row(i)) {
                inter += usize::from(a == 1 && b == 1);
                union += usize::from(a == 1 || b == 1);
            }
            if union == 0 {
                1.0
            } else {
                inter as f64 / union as f64
            }
        })
        .sum();
    Ok(total / p as f64)
}

pub fn single_label_accuracy(preds: &[u8], truth: &[u8]) -> Result<f64, MetricsError> {
    if preds.len() != truth.len() {
        return Err(MetricsError::Shape(format!("{} predictions for {} targets", preds.len(), truth.len())));
    }
    if truth.is_empty() {
        return Err(MetricsError::Empty);
    }
    let hits = preds.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// All four measures for one prediction batch.
pub fn evaluate(
    preds: &LabelMatrix,
    scores: &DenseMatrix,
    truth: &LabelMatrix,
) -> Result<EvaluationResult, MetricsError> {
    let oe = one_error(scores, truth)?;
    let rl = ranking_loss(scores, truth)?;
    Ok(EvaluationResult {
        hamming_loss: hamming_loss(preds, truth)?,
        ranking_loss: rl.value,
        one_error: oe.value,
        ml_accuracy: ml_accuracy(preds, truth)?,
        skipped: SkippedInstances { one_error: oe.skipped, ranking_loss: rl.skipped },
    })
}

/// Ranks of `values` (1 = best) under `dir` and `tie`.
pub fn rank_values(values: &[f64], dir: Direction, tie: TieRule) -> Vec<f64> {
    let better = |a: f64, b: f64| match dir {
        Direction::LowerBetter => a.total_cmp(&b),
        Direction::HigherBetter => b.total_cmp(&a),
    };
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| better(values[a], values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && better(values[idx[start]], values[idx[end]]) == Ordering::Equal {
            end += 1;
        }
        let r = match tie {
            TieRule::Average => (start + 1 + end) as f64 / 2.0,
            TieRule::Competition => (start + 1) as f64,
        };
        for &i in &idx[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Mean rank per method over the rows (datasets) of `table`.
pub fn average_rank(table: &[Vec<f64>], dir: Direction, tie: TieRule) -> Result<Vec<f64>, MetricsError> {
    let m = table.first().map(Vec::len).ok_or(MetricsError::Empty)?;
    if m == 0 {
        return Err(MetricsError::Empty);
    }
    let mut sum = vec![0.0; m];
    for (d, row) in table.iter().enumerate() {
        if row.len() != m {
            return Err(MetricsError::Shape(format!("row {d} has {} methods, expected {m}", row.len())));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(MetricsError::MissingCell { dataset: d, method: j });
        }
        for (s, r) in sum.iter_mut().zip(rank_values(row, dir, tie)) {
            *s += r;
        }
    }
    Ok(sum.into_iter().map(|s| s / table.len() as f64).collect())
}

/// Kendall's tau-b between two score vectors over the same items. When
/// either side is constant the coefficient is undefined; it is reported as
/// 1 if both induce the same (tie) pattern and 0 otherwise.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::Shape(format!("{} vs {} items", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(MetricsError::Empty);
    }
    let (mut conc, mut disc, mut ties_a, mut ties_b, mut pairs) = (0i64, 0i64, 0i64, 0i64, 0i64);
    let mut identical = true;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let sa = a[i].total_cmp(&a[j]);
            let sb = b[i].total_cmp(&b[j]);
            pairs += 1;
            identical &= sa == sb;
            match (sa, sb) {
                (Ordering::Equal, Ordering::Equal) => {
                    ties_a += 1;
                    ties_b += 1;
                }
                (Ordering::Equal, _) => ties_a += 1,
                (_, Ordering::Equal) => ties_b += 1,
                _ if sa == sb => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let denom = (((pairs - ties_a) * (pairs - ties_b)) as f64).sqrt();
    if denom == 0.0 {
        return Ok(if identical { 1.0 } else { 0.0 });
    }
    Ok((conc - disc) as f64 / denom)
}
