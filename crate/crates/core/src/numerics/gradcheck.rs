use serde::Serialize;

use super::{GradStore, ParamStore};
use crate::error::{Error, Result};

/// `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorCheck {
    pub name: String,
    pub max_relative_error: f64,
    /// Flat index of the worst entry.
    pub worst_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub tensors: Vec<TensorCheck>,
    pub max_relative_error: f64,
}

impl GradCheckReport {
    /// Largest error over every tensor whose name satisfies `pred`.
    pub fn max_where(&self, pred: impl Fn(&str) -> bool) -> f64 {
        self.tensors
            .iter()
            .filter(|t| pred(&t.name))
            .map(|t| t.max_relative_error)
            .fold(0.0, f64::max)
    }
}

/// Compares analytic gradients against central differences, entry by entry.
///
/// `loss_fn` returns the loss and its analytic gradient at the given
/// parameters. The gradient from the unperturbed evaluation is the one that is
/// checked; perturbed evaluations only use the loss.
pub fn finite_diff_check<F>(mut loss_fn: F, params: &ParamStore, eps: f64) -> Result<GradCheckReport>
where
    F: FnMut(&ParamStore) -> Result<(f64, GradStore)>,
{
    if !(eps > 0.0) {
        return Err(Error::Config(format!("finite-difference eps must be > 0, got {eps}")));
    }
    let (first, analytic) = loss_fn(params)?;
    let (second, _) = loss_fn(params)?;
    if first.to_bits() != second.to_bits() {
        return Err(Error::NonDeterministicLoss { first, second });
    }
    check_with_gradient(|p| loss_fn(p).map(|(l, _)| l), params, &analytic, eps)
}

/// Same as [`finite_diff_check`] with an externally supplied gradient.
pub fn check_with_gradient<F>(
    mut loss: F,
    params: &ParamStore,
    analytic: &GradStore,
    eps: f64,
) -> Result<GradCheckReport>
where
    F: FnMut(&ParamStore) -> Result<f64>,
{
    params.check_layout(analytic)?;
    let mut probe = params.clone();
    let mut tensors = Vec::with_capacity(params.len());
    let mut overall = 0.0f64;
    for ti in 0..params.len() {
        let mut worst = 0.0f64;
        let mut worst_index = 0;
        for k in 0..params.value(ti).len() {
            let orig = params.value(ti).as_slice()[k];
            probe.value_mut(ti).as_mut_slice()[k] = orig + eps;
            let plus = loss(&probe)?;
            probe.value_mut(ti).as_mut_slice()[k] = orig - eps;
            let minus = loss(&probe)?;
            probe.value_mut(ti).as_mut_slice()[k] = orig;
            let numeric = (plus - minus) / (2.0 * eps);
            let err = relative_error(analytic.value(ti).as_slice()[k], numeric);
            if err > worst || err.is_nan() {
                worst = err;
                worst_index = k;
            }
        }
        overall = overall.max(worst);
        tensors.push(TensorCheck {
            name: params.name(ti).to_string(),
            max_relative_error: worst,
            worst_index,
        });
    }
    Ok(GradCheckReport {
        tensors,
        max_relative_error: overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use std::cell::Cell;

    fn scalar_store(v: f64) -> ParamStore {
        let mut p = ParamStore::new();
        p.push("p", Matrix::row_vector(&[v]));
        p
    }

    fn quadratic(p: &ParamStore, scale: f64) -> Result<(f64, GradStore)> {
        let x = p.value(0).as_slice()[0];
        Ok((x * x, scalar_store(scale * 2.0 * x)))
    }

    #[test]
    fn quadratic_gradient_is_exact() {
        let r = finite_diff_check(|p| quadratic(p, 1.0), &scalar_store(3.0), 1e-5).unwrap();
        assert!(r.max_relative_error < 1e-9, "{r:?}");
    }

    #[test]
    fn doubled_gradient_reports_half() {
        let r = finite_diff_check(|p| quadratic(p, 2.0), &scalar_store(3.0), 1e-5).unwrap();
        assert!((r.max_relative_error - 0.5).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn nondeterministic_loss_is_rejected() {
        let calls = Cell::new(0.0);
        let res = finite_diff_check(
            |p| {
                calls.set(calls.get() + 1.0);
                Ok((calls.get(), p.clone()))
            },
            &scalar_store(1.0),
            1e-5,
        );
        assert!(matches!(res, Err(Error::NonDeterministicLoss { .. })));
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(0.0, 0.0), 0.0);
        assert!((relative_error(1e-9, 0.0) - 0.1).abs() < 1e-12);
        assert!((relative_error(2.0, 1.0) - 0.5).abs() < 1e-15);
    }
}
