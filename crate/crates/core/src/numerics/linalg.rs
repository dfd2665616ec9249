//! Small dense solvers for the closed-form baselines and the LSTAR estimator.

use super::Matrix;
use crate::error::{Error, Result};

/// Condition estimates above this are treated as numerically singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Least-squares solution of `A·x ≈ b` via Householder QR.
///
/// Returns the coefficients and the residual sum of squares. Fails with
/// [`Error::RankDeficient`] when the ratio of the largest to smallest
/// diagonal entry of `R` exceeds [`MAX_CONDITION`].
pub fn lstsq_qr(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (n, p) = a.shape();
    if b.len() != n {
        return Err(Error::dim("lstsq_qr", a.shape_str(), format!("rhs {}", b.len())));
    }
    if n < p || p == 0 {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
        });
    }
    // Column-major working copy keeps the Householder sweeps contiguous.
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| (0..n).map(|i| a.get(i, j)).collect()).collect();
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; p];

    for k in 0..p {
        let norm = cols[k][k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient {
                condition: f64::INFINITY,
            });
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            let reflect = |col: &mut [f64]| {
                let s: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vnorm2;
                for (c, vi) in col.iter_mut().zip(&v) {
                    *c -= s * vi;
                }
            };
            for col in cols.iter_mut().skip(k + 1) {
                reflect(&mut col[k..]);
            }
            reflect(&mut rhs[k..]);
        }
    }

    let max_d = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let min_d = diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    let condition = max_d / min_d;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }

    let mut x = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = rhs[k];
        for j in k + 1..p {
            s -= cols[j][k] * x[j];
        }
        x[k] = s / diag[k];
    }
    let rss = rhs[p..].iter().map(|r| r * r).sum();
    Ok((x, rss))
}

/// Solves `A·X = B` for symmetric positive definite `A` by Cholesky.
///
/// The condition estimate is the squared ratio of the extreme pivots of the
/// factor, which tracks the true 2-norm condition number to within a modest
/// factor for the Gram matrices this is used on.
pub fn cholesky_solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::dim("cholesky_solve", a.shape_str(), b.shape_str()));
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) {
            return Err(Error::RankDeficient {
                condition: f64::INFINITY,
            });
        }
        let ljj = d.sqrt();
        l.set(j, j, ljj);
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    let max_d = (0..n).map(|i| l.get(i, i)).fold(0.0f64, f64::max);
    let min_d = (0..n).map(|i| l.get(i, i)).fold(f64::INFINITY, f64::min);
    let condition = (max_d / min_d).powi(2);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }

    let m = b.cols();
    let mut x = b.clone();
    for c in 0..m {
        // L·y = b
        for i in 0..n {
            let mut s = x.get(i, c);
            for k in 0..i {
                s -= l.get(i, k) * x.get(k, c);
            }
            x.set(i, c, s / l.get(i, i));
        }
        // Lᵀ·x = y
        for i in (0..n).rev() {
            let mut s = x.get(i, c);
            for k in i + 1..n {
                s -= l.get(k, i) * x.get(k, c);
            }
            x.set(i, c, s / l.get(i, i));
        }
    }
    Ok(x)
}
