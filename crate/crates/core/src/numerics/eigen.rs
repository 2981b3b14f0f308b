//! Dense symmetric eigensolver (cyclic Jacobi).

use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use super::{NumericsError, Tolerances};

/// Eigenpairs with ascending values; column `j` of `vectors` pairs with
/// `values[j]`. Each vector's largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenPairs {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.vectors.column(j)
    }
}

/// The `m` smallest eigenpairs of a symmetric matrix.
pub fn eigh_smallest(a: &DenseMatrix, m: usize) -> Result<EigenPairs, NumericsError> {
    eigh_smallest_with(a, m, &Tolerances::default())
}

pub fn eigh_smallest_with(a: &DenseMatrix, m: usize, tol: &Tolerances) -> Result<EigenPairs, NumericsError> {
    let n = a.rows();
    if m > n {
        return Err(NumericsError::InvalidArgument(format!("requested {m} eigenpairs of a {n}x{n} matrix")));
    }
    let asym = a.asymmetry().ok_or_else(|| {
        NumericsError::Shape(format!("eigensolver needs a square matrix, got {}x{}", a.rows(), a.cols()))
    })?;
    if !a.all_finite() {
        return Err(NumericsError::NonFinite);
    }
    if asym > tol.symmetry * a.max_abs().max(1.0) {
        return Err(NumericsError::NotSymmetric(asym));
    }

    let (values, vectors) = jacobi(a, tol.jacobi_max_sweeps)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    order.truncate(m);

    let mut out_vals = Vec::with_capacity(m);
    let mut out_vecs = DenseMatrix::zeros(n, m);
    for (c, &k) in order.iter().enumerate() {
        out_vals.push(values[k]);
        let mut v: Vec<f64> = (0..n).map(|r| vectors[(r, k)]).collect();
        canonical_sign(&mut v);
        for (r, x) in v.into_iter().enumerate() {
            out_vecs[(r, c)] = x;
        }
    }
    let pairs = EigenPairs { values: out_vals, vectors: out_vecs };
    check_pairs(a, &pairs, tol)?;
    Ok(pairs)
}

fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Residual and orthonormality bounds required of every solve.
pub fn check_pairs(a: &DenseMatrix, pairs: &EigenPairs, tol: &Tolerances) -> Result<(), NumericsError> {
    let n = a.rows();
    let m = pairs.values.len();
    let scale = a.norm_inf();
    let cols: Vec<Vec<f64>> = (0..m).map(|j| pairs.vector(j)).collect();
    for (j, v) in cols.iter().enumerate() {
        let av = a.matvec(v);
        let resid = (0..n).fold(0.0f64, |r, i| r.max((av[i] - pairs.values[j] * v[i]).abs()));
        if resid > tol.eigen_residual * scale {
            return Err(NumericsError::Convergence(format!(
                "eigenpair {j} residual {resid:e} exceeds {:e}",
                tol.eigen_residual * scale
            )));
        }
        let norm = super::matrix::dot(v, v);
        if (norm - 1.0).abs() > tol.eigen_norm {
            return Err(NumericsError::Convergence(format!("eigenvector {j} has squared norm {norm}")));
        }
        for (k, w) in cols.iter().enumerate().skip(j + 1) {
            let d = super::matrix::dot(v, w).abs();
            if d > tol.eigen_orthogonality {
                return Err(NumericsError::Convergence(format!("eigenvectors {j} and {k} have dot product {d:e}")));
            }
        }
    }
    Ok(())
}

/// Full cyclic Jacobi diagonalization. Returns unsorted eigenvalues and the
/// matrix whose columns are the corresponding eigenvectors.
fn jacobi(a: &DenseMatrix, max_sweeps: usize) -> Result<(Vec<f64>, DenseMatrix), NumericsError> {
    let n = a.rows();
    let mut m = a.clone();
    // Work on the exactly symmetric part.
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let s = m.as_mut_slice();
    let vs = v.as_mut_slice();

    let frob2: f64 = s.iter().map(|x| x * x).sum();
    if n < 2 || frob2 == 0.0 {
        let diag = (0..n).map(|i| s[i * n + i]).collect();
        return Ok((diag, v));
    }

    for sweep in 0..max_sweeps {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off2 += s[p * n + q] * s[p * n + q];
            }
        }
        if off2 <= f64::EPSILON * f64::EPSILON * frob2 * 1e-4 || off2 == 0.0 {
            let diag = (0..n).map(|i| s[i * n + i]).collect();
            return Ok((diag, v));
        }
        // Small-element threshold during the first sweeps, as in the
        // classical threshold Jacobi method.
        let thresh = if sweep < 3 { 0.2 * off2.sqrt() / (n * n) as f64 } else { 0.0 };

        for p in 0..n {
            for q in p + 1..n {
                let apq = s[p * n + q];
                let g = 100.0 * apq.abs();
                let app = s[p * n + p];
                let aqq = s[q * n + q];
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    s[p * n + q] = 0.0;
                    s[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh || apq == 0.0 {
                    continue;
                }
                let h = aqq - app;
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);
                let d = t * apq;
                s[p * n + p] -= d;
                s[q * n + q] += d;
                s[p * n + q] = 0.0;
                s[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = s[r * n + p];
                    let arq = s[r * n + q];
                    let nrp = arp - sn * (arq + tau * arp);
                    let nrq = arq + sn * (arp - tau * arq);
                    s[r * n + p] = nrp;
                    s[p * n + r] = nrp;
                    s[r * n + q] = nrq;
                    s[q * n + r] = nrq;
                }
                for r in 0..n {
                    let vrp = vs[r * n + p];
                    let vrq = vs[r * n + q];
                    vs[r * n + p] = vrp - sn * (vrq + tau * vrp);
                    vs[r * n + q] = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
    }
    Err(NumericsError::Convergence(format!("Jacobi did not converge in {max_sweeps} sweeps")))
}
