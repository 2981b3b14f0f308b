//! Least-angle regression with the lasso modification.
//!
//! Columns of `X` are centered and scaled to unit norm and `y` is centered
//! before the path starts. Coefficients are reported on the original column
//! scale.

use serde::{Deserialize, Serialize};

use super::matrix::{dot, DenseMatrix};
use super::{NumericsError, Tolerances};

/// One breakpoint of the path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LarsStep {
    pub added: Option<usize>,
    pub dropped: Option<usize>,
    /// Active features after the step, in activation order.
    pub active: Vec<usize>,
    /// Full coefficient vector after the step (original scale).
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LarsPath {
    pub steps: Vec<LarsStep>,
}

impl LarsPath {
    /// Active set with signed coefficients at the end of the path.
    pub fn final_active(&self) -> Vec<(usize, f64)> {
        self.steps.last().map(|s| s.active.iter().map(|&j| (j, s.coefficients[j])).collect()).unwrap_or_default()
    }

    /// The state [`lars_path`] would return with `max_active = d`, read off
    /// a path traced with a larger `max_active`.
    pub fn at_cardinality(&self, d: usize) -> Vec<(usize, f64)> {
        let step = self.steps.iter().find(|s| s.active.len() >= d && s.dropped.is_none()).or(self.steps.last());
        step.map(|s| s.active.iter().map(|&j| (j, s.coefficients[j])).collect()).unwrap_or_default()
    }
}

/// Runs LARS-lasso until `max_active` features are active or all
/// correlations vanish, returning `(feature, coefficient)` pairs.
pub fn lars_path(x: &DenseMatrix, y: &[f64], max_active: usize) -> Result<Vec<(usize, f64)>, NumericsError> {
    Ok(lars_trace(x, y, max_active, &Tolerances::default())?.final_active())
}

/// Cholesky factor of the Gram matrix of the active columns, grown one
/// column at a time.
struct Cholesky {
    l: Vec<Vec<f64>>,
}

impl Cholesky {
    /// Row to append for a new column with Gram entries `g` (last entry is
    /// the diagonal); `None` when the column is numerically dependent.
    fn extension(&self, g: &[f64], tol: f64) -> Option<Vec<f64>> {
        let k = self.l.len();
        let mut row = vec![0.0; k + 1];
        for i in 0..k {
            let s: f64 = (0..i).map(|t| self.l[i][t] * row[t]).sum();
            row[i] = (g[i] - s) / self.l[i][i];
        }
        let d = g[k] - row[..k].iter().map(|v| v * v).sum::<f64>();
        if d <= tol {
            return None;
        }
        row[k] = d.sqrt();
        Some(row)
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = self.l.len();
        let mut z = vec![0.0; k];
        for i in 0..k {
            let s: f64 = (0..i).map(|t| self.l[i][t] * z[t]).sum();
            z[i] = (b[i] - s) / self.l[i][i];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|t| self.l[t][i] * x[t]).sum();
            x[i] = (z[i] - s) / self.l[i][i];
        }
        x
    }

    fn rebuild(cols: &[Vec<f64>], active: &[usize], tol: f64) -> Option<Self> {
        let mut ch = Cholesky { l: Vec::new() };
        for (a, &j) in active.iter().enumerate() {
            let g: Vec<f64> = active[..=a].iter().map(|&i| dot(&cols[i], &cols[j])).collect();
            let row = ch.extension(&g, tol)?;
            ch.l.push(row);
        }
        Some(ch)
    }
}

/// Full path record; see [`lars_path`].
pub fn lars_trace(x: &DenseMatrix, y: &[f64], max_active: usize, tol: &Tolerances) -> Result<LarsPath, NumericsError> {
    if max_active == 0 {
        return Err(NumericsError::InvalidArgument("max_active must be at least 1".into()));
    }
    let (n, m) = x.shape();
    if y.len() != n {
        return Err(NumericsError::Shape(format!("response has {} entries, X has {n} rows", y.len())));
    }
    if max_active > m {
        return Err(NumericsError::InvalidArgument(format!("max_active {max_active} exceeds {m} columns")));
    }
    if !x.all_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite);
    }

    // Centered, unit-norm columns; zero-norm columns can never enter.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut scale = vec![0.0; m];
    let mut usable = vec![true; m];
    for j in 0..m {
        let mut c = x.column(j);
        let mean = c.iter().sum::<f64>() / n as f64;
        c.iter_mut().for_each(|v| *v -= mean);
        let norm = dot(&c, &c).sqrt();
        if norm > tol.lars_degenerate {
            c.iter_mut().for_each(|v| *v /= norm);
            scale[j] = norm;
        } else {
            usable[j] = false;
        }
        cols.push(c);
    }
    let ymean = y.iter().sum::<f64>() / n as f64;
    let mut resid: Vec<f64> = y.iter().map(|v| v - ymean).collect();

    let mut beta = vec![0.0; m];
    let mut active: Vec<usize> = Vec::new();
    let mut chol = Cholesky { l: Vec::new() };
    let mut steps = Vec::new();
    let mut just_dropped = false;
    let max_iter = 8 * m.max(max_active) + 100;

    for _ in 0..max_iter {
        let corr: Vec<f64> = cols.iter().map(|c| dot(c, &resid)).collect();
        let cmax = (0..m).filter(|&j| usable[j]).fold(0.0f64, |a, j| a.max(corr[j].abs()));
        if cmax < tol.lars_correlation {
            break;
        }

        let mut added = None;
        if !just_dropped {
            if active.len() >= max_active {
                break;
            }
            // Strongest inactive candidate that keeps the Gram matrix
            // positive definite.
            loop {
                let cand = (0..m).filter(|&j| usable[j] && !active.contains(&j)).fold(
                    None,
                    |best: Option<usize>, j| match best {
                        Some(b) if corr[b].abs() >= corr[j].abs() => Some(b),
                        _ => Some(j),
                    },
                );
                let Some(j) = cand else { break };
                let g: Vec<f64> = active.iter().chain(std::iter::once(&j)).map(|&i| dot(&cols[i], &cols[j])).collect();
                match chol.extension(&g, tol.lars_degenerate) {
                    Some(row) => {
                        chol.l.push(row);
                        active.push(j);
                        added = Some(j);
                        break;
                    }
                    None => usable[j] = false,
                }
            }
            if added.is_none() && active.is_empty() {
                break;
            }
        }
        just_dropped = false;

        // Equiangular direction.
        let signs: Vec<f64> = active.iter().map(|&j| corr[j].signum()).collect();
        let gs = chol.solve(&signs);
        let a_norm = 1.0 / dot(&signs, &gs).sqrt();
        let w: Vec<f64> = gs.iter().map(|v| v * a_norm).collect();
        let mut u = vec![0.0; n];
        for (&j, &wj) in active.iter().zip(&w) {
            for (ui, cij) in u.iter_mut().zip(&cols[j]) {
                *ui += wj * cij;
            }
        }

        let mut gamma = cmax / a_norm;
        for j in (0..m).filter(|&j| usable[j] && !active.contains(&j)) {
            let aj = dot(&cols[j], &u);
            for g in [(cmax - corr[j]) / (a_norm - aj), (cmax + corr[j]) / (a_norm + aj)] {
                if g > tol.lars_step && g < gamma {
                    gamma = g;
                }
            }
        }
        // Lasso modification: stop where an active coefficient crosses zero.
        let mut drop = None;
        for (a, &j) in active.iter().enumerate() {
            if beta[j] == 0.0 || w[a] == 0.0 {
                continue;
            }
            let g = -beta[j] / w[a];
            if g > tol.lars_step && g < gamma {
                gamma = g;
                drop = Some(a);
            }
        }

        for (&j, &wj) in active.iter().zip(&w) {
            beta[j] += gamma * wj;
        }
        for (r, ui) in resid.iter_mut().zip(&u) {
            *r -= gamma * ui;
        }
        let mut dropped = None;
        if let Some(a) = drop {
            let j = active.remove(a);
            beta[j] = 0.0;
            dropped = Some(j);
            just_dropped = true;
            chol = Cholesky::rebuild(&cols, &active, tol.lars_degenerate)
                .ok_or_else(|| NumericsError::Convergence("active Gram matrix became singular".into()))?;
        }
        steps.push(LarsStep {
            added,
            dropped,
            active: active.clone(),
            coefficients: (0..m).map(|j| if scale[j] > 0.0 { beta[j] / scale[j] } else { 0.0 }).collect(),
        });
    }
    Ok(LarsPath { steps })
}
