use crate::error::{Error, Result};
use crate::numerics::linalg::cholesky_solve;
use crate::numerics::{affine_forward, Matrix, ParamStore};

/// Ridge added to the Gram matrix of the standardized design.
pub const RIDGE: f64 = 1e-8;

/// Ordinary least squares with an intercept, one independent fit per output
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRegression {
    /// `q × τ`
    pub weights: Matrix,
    /// one per output
    pub intercept: Vec<f64>,
}

/// Fits `Y ≈ X·W + b` through the normal equations.
///
/// Columns of `X` are centered and scaled to unit variance before forming the
/// Gram matrix, so predictions do not depend on affine re-scaling of inputs.
pub fn fit_linear_regression(x: &Matrix, y: &Matrix) -> Result<LinearRegression> {
    let (n, q) = x.shape();
    if y.rows() != n {
        return Err(Error::dim("fit_linear_regression", x.shape_str(), y.shape_str()));
    }
    if n <= q {
        return Err(Error::Config(format!(
            "linear regression needs more rows than inputs ({n} rows, {q} inputs)"
        )));
    }
    let tau = y.cols();
    let nf = n as f64;

    let x_mean = x.col_sums().into_iter().map(|s| s / nf).collect::<Vec<_>>();
    let y_mean = y.col_sums().into_iter().map(|s| s / nf).collect::<Vec<_>>();
    let mut x_std = vec![0.0; q];
    for r in 0..n {
        for (j, v) in x.row(r).iter().enumerate() {
            let e = v - x_mean[j];
            x_std[j] += e * e;
        }
    }
    for s in &mut x_std {
        *s = (*s / nf).sqrt();
    }
    if let Some(&min_std) = x_std.iter().min_by(|a, b| a.total_cmp(b)) {
        let max_std = x_std.iter().fold(0.0f64, |m, &s| m.max(s));
        if !(min_std > 1e-12 * max_std.max(1e-300)) {
            // A constant input column is collinear with the intercept.
            return Err(Error::RankDeficient {
                condition: f64::INFINITY,
            });
        }
    }

    let mut xs = x.clone();
    for r in 0..n {
        for (j, v) in xs.row_mut(r).iter_mut().enumerate() {
            *v = (*v - x_mean[j]) / x_std[j];
        }
    }
    let mut yc = y.clone();
    for r in 0..n {
        for (j, v) in yc.row_mut(r).iter_mut().enumerate() {
            *v -= y_mean[j];
        }
    }
    let mut gram = xs.t_matmul(&xs)?;
    for j in 0..q {
        gram.set(j, j, gram.get(j, j) + RIDGE);
    }
    let rhs = xs.t_matmul(&yc)?;
    let ws = cholesky_solve(&gram, &rhs)?;

    let mut weights = Matrix::zeros(q, tau);
    let mut intercept = y_mean;
    for j in 0..q {
        for k in 0..tau {
            let w = ws.get(j, k) / x_std[j];
            weights.set(j, k, w);
            intercept[k] -= w * x_mean[j];
        }
    }
    Ok(LinearRegression { weights, intercept })
}

impl LinearRegression {
    pub fn predict(&self, x: &Matrix) -> Result<Matrix> {
        affine_forward(x, &self.weights, &self.intercept)
    }

    pub fn num_parameters(&self) -> usize {
        self.weights.len() + self.intercept.len()
    }

    /// Same layout as a linear network: `head.W`, `head.b`.
    pub fn to_params(&self) -> ParamStore {
        let mut p = ParamStore::new();
        p.push("head.W", self.weights.clone());
        p.push("head.b", Matrix::row_vector(&self.intercept));
        p
    }

    pub fn from_params(params: &ParamStore) -> Result<Self> {
        let w = params
            .get("head.W")
            .ok_or_else(|| Error::Checkpoint("missing head.W".into()))?;
        let b = params
            .get("head.b")
            .ok_or_else(|| Error::Checkpoint("missing head.b".into()))?;
        if b.len() != w.cols() {
            return Err(Error::dim("LinearRegression::from_params", w.shape_str(), b.shape_str()));
        }
        Ok(Self {
            weights: w.clone(),
            intercept: b.as_slice().to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(n: usize) -> Matrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.37).sin(), (t * 0.11).cos() * 3.0, t / n as f64]
            })
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn exact_linear_target_is_recovered() {
        let x = design(50);
        let truth = [1.5, -0.25, 4.0];
        let y: Vec<[f64; 1]> = (0..50)
            .map(|i| [0.7 + x.row(i).iter().zip(truth).map(|(a, b)| a * b).sum::<f64>()])
            .collect();
        let y = Matrix::from_rows(&y).unwrap();
        let fit = fit_linear_regression(&x, &y).unwrap();
        for (j, t) in truth.iter().enumerate() {
            assert!((fit.weights.get(j, 0) - t).abs() < 1e-7, "{j}");
        }
        assert!((fit.intercept[0] - 0.7).abs() < 1e-7);
        let pred = fit.predict(&x).unwrap();
        let resid: f64 = pred
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-8, "{resid}");
    }

    #[test]
    fn constant_target_gives_flat_fit() {
        let x = design(30);
        let y = Matrix::filled(30, 2, 3.25);
        let fit = fit_linear_regression(&x, &y).unwrap();
        assert!(fit.weights.as_slice().iter().all(|w| w.abs() < 1e-12));
        assert!(fit.intercept.iter().all(|b| (b - 3.25).abs() < 1e-12));
    }

    #[test]
    fn exact_collinearity_is_rescued_by_ridge() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y = Matrix::from_vec(20, 1, (0..20).map(|i| 3.0 * i as f64 - 1.0).collect()).unwrap();
        let fit = fit_linear_regression(&x, &y).unwrap();
        let pred = fit.predict(&x).unwrap();
        for (p, t) in pred.as_slice().iter().zip(y.as_slice()) {
            assert!((p - t).abs() < 1e-6, "{p} vs {t}");
        }
    }

    #[test]
    fn constant_column_is_rejected() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, 5.0]).collect();
        let err = fit_linear_regression(&Matrix::from_rows(&rows).unwrap(), &Matrix::zeros(20, 1)).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }), "{err}");
        assert!(err.to_string().contains("condition"));
    }

    #[test]
    fn too_few_rows() {
        assert!(fit_linear_regression(&Matrix::zeros(3, 3), &Matrix::zeros(3, 1)).is_err());
    }
}
