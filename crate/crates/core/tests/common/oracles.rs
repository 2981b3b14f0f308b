#![allow(clippy::needless_range_loop)]

//! Direct, unoptimized transcriptions used as reference implementations.

use std::collections::BTreeSet;

use mlufs::numerics::DenseMatrix;

fn set_of(row: &[u8]) -> BTreeSet<usize> {
    row.iter().enumerate().filter(|(_, &v)| v == 1).map(|(l, _)| l).collect()
}

pub fn hamming_loss(preds: &[Vec<u8>], truth: &[Vec<u8>]) -> f64 {
    let q = truth[0].len() as f64;
    let mut total = 0.0;
    for (h, y) in preds.iter().zip(truth) {
        let (h, y) = (set_of(h), set_of(y));
        total += h.symmetric_difference(&y).count() as f64 / q;
    }
    total / truth.len() as f64
}

/// `(value, skipped)`, `None` when every instance is skipped.
pub fn one_error(scores: &[Vec<f64>], truth: &[Vec<u8>]) -> Option<(f64, usize)> {
    let (mut wrong, mut used, mut skipped) = (0, 0, 0);
    for (f, y) in scores.iter().zip(truth) {
        let y = set_of(y);
        if y.is_empty() {
            skipped += 1;
            continue;
        }
        let max = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let top = f.iter().position(|&v| v == max).unwrap();
        used += 1;
        if !y.contains(&top) {
            wrong += 1;
        }
    }
    (used > 0).then(|| (wrong as f64 / used as f64, skipped))
}

pub fn ranking_loss(scores: &[Vec<f64>], truth: &[Vec<u8>]) -> Option<(f64, usize)> {
    let (mut total, mut used, mut skipped) = (0.0, 0, 0);
    for (f, y) in scores.iter().zip(truth) {
        let rel = set_of(y);
        let irr: BTreeSet<usize> = (0..y.len()).filter(|l| !rel.contains(l)).collect();
        if rel.is_empty() || irr.is_empty() {
            skipped += 1;
            continue;
        }
        let mut bad = 0;
        for &a in &rel {
            for &b in &irr {
                if f[a] <= f[b] {
                    bad += 1;
                }
            }
        }
        total += bad as f64 / (rel.len() * irr.len()) as f64;
        used += 1;
    }
    (used > 0).then(|| (total / used as f64, skipped))
}

pub fn ml_accuracy(preds: &[Vec<u8>], truth: &[Vec<u8>]) -> f64 {
    let mut total = 0.0;
    for (h, y) in preds.iter().zip(truth) {
        let (h, y) = (set_of(h), set_of(y));
        let union = h.union(&y).count();
        total += if union == 0 { 1.0 } else { h.intersection(&y).count() as f64 / union as f64 };
    }
    total / truth.len() as f64
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for j in 0..a.len() {
        s += (a[j] - b[j]) * (a[j] - b[j]);
    }
    s
}

/// Indices of the k nearest rows by full sort on (distance, index).
pub fn knn(points: &[Vec<f64>], query: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> =
        (0..points.len()).filter(|&i| Some(i) != exclude).map(|i| (dist2(&points[i], query), i)).collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}

pub struct NaiveMlknn {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<u8>>,
    pub k: usize,
    pub prior: Vec<f64>,
    pub cond1: Vec<Vec<f64>>,
    pub cond0: Vec<Vec<f64>>,
}

pub fn mlknn_fit(x: &[Vec<f64>], y: &[Vec<u8>], k: usize, s: f64) -> NaiveMlknn {
    let p = x.len();
    let q = y[0].len();
    let mut prior = vec![0.0; q];
    let mut cond1 = vec![vec![0.0; k + 1]; q];
    let mut cond0 = vec![vec![0.0; k + 1]; q];
    for l in 0..q {
        let with: usize = (0..p).filter(|&i| y[i][l] == 1).count();
        prior[l] = (s + with as f64) / (2.0 * s + p as f64);
        let mut c1 = vec![0usize; k + 1];
        let mut c0 = vec![0usize; k + 1];
        for i in 0..p {
            let delta = knn(x, &x[i], k, Some(i)).iter().filter(|&&n| y[n][l] == 1).count();
            if y[i][l] == 1 {
                c1[delta] += 1;
            } else {
                c0[delta] += 1;
            }
        }
        let t1: usize = c1.iter().sum();
        let t0: usize = c0.iter().sum();
        for j in 0..=k {
            cond1[l][j] = (s + c1[j] as f64) / (s * (k + 1) as f64 + t1 as f64);
            cond0[l][j] = (s + c0[j] as f64) / (s * (k + 1) as f64 + t0 as f64);
        }
    }
    NaiveMlknn { x: x.to_vec(), y: y.to_vec(), k, prior, cond1, cond0 }
}

impl NaiveMlknn {
    pub fn predict(&self, query: &[f64]) -> (Vec<u8>, Vec<f64>) {
        let nbrs = knn(&self.x, query, self.k, None);
        let q = self.prior.len();
        let mut h = vec![0; q];
        let mut f = vec![0.0; q];
        for l in 0..q {
            let c = nbrs.iter().filter(|&&n| self.y[n][l] == 1).count();
            let a = self.prior[l] * self.cond1[l][c];
            let b = (1.0 - self.prior[l]) * self.cond0[l][c];
            f[l] = a / (a + b);
            h[l] = u8::from(f[l] > 0.5);
        }
        (h, f)
    }
}

/// Number of eigenvalues of symmetric `a` below `sigma`, from the signs of
/// the pivots of `a − σI` (Sylvester's law of inertia).
fn count_below(a: &DenseMatrix, sigma: f64) -> usize {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| a[(i, j)] - if i == j { sigma } else { 0.0 }).collect()).collect();
    let mut neg = 0;
    for k in 0..n {
        let mut piv = m[k][k];
        if piv == 0.0 {
            piv = -1e-300;
        }
        if piv < 0.0 {
            neg += 1;
        }
        for i in k + 1..n {
            let f = m[i][k] / piv;
            for j in k + 1..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    neg
}

/// All eigenvalues of a symmetric matrix by inertia bisection, ascending.
pub fn eigenvalues_by_bisection(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let bound = (0..n).map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max) + 1.0;
    (0..n)
        .map(|idx| {
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(a, mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Column with the best one-variable least-squares fit (largest R²),
/// ties to the lower index.
pub fn best_single_feature(x: &DenseMatrix, y: &[f64]) -> usize {
    let n = x.rows();
    let ym = y.iter().sum::<f64>() / n as f64;
    let syy: f64 = y.iter().map(|v| (v - ym).powi(2)).sum();
    let mut best = (0, f64::NEG_INFINITY);
    for j in 0..x.cols() {
        let c = x.column(j);
        let cm = c.iter().sum::<f64>() / n as f64;
        let sxx: f64 = c.iter().map(|v| (v - cm).powi(2)).sum();
        let sxy: f64 = c.iter().zip(y).map(|(a, b)| (a - cm) * (b - ym)).sum();
        let r2 = sxy * sxy / (sxx * syy);
        if r2 > best.1 {
            best = (j, r2);
        }
    }
    best.0
}

/// Least-squares slopes with an intercept, via the normal equations of the
/// centered problem and Gauss-Jordan elimination with partial pivoting.
pub fn ols_slopes(x: &DenseMatrix, y: &[f64]) -> Vec<f64> {
    let (n, m) = x.shape();
    let means: Vec<f64> = (0..m).map(|j| x.column(j).iter().sum::<f64>() / n as f64).collect();
    let ym = y.iter().sum::<f64>() / n as f64;
    let mut a = vec![vec![0.0; m + 1]; m];
    for r in 0..m {
        for c in 0..m {
            a[r][c] = (0..n).map(|i| (x[(i, r)] - means[r]) * (x[(i, c)] - means[c])).sum();
        }
        a[r][m] = (0..n).map(|i| (x[(i, r)] - means[r]) * (y[i] - ym)).sum();
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..m).map(|r| a[r][m] / a[r][r]).collect()
}
