mod common;

use common::{normal, rng};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use stanforge::baselines::{fit_linear_regression, mlp_parameter_count, build_mlp, MlpSpec};
use stanforge::numerics::Matrix;
use stanforge::Model;

/// Least squares with an intercept column, solved by Householder QR.
fn qr_oracle(x: &Matrix, y: &[f64]) -> Vec<f64> {
    let (n, q) = x.shape();
    let a = DMatrix::from_fn(n, q + 1, |r, c| if c == q { 1.0 } else { x.get(r, c) });
    let qr = a.clone().qr();
    let rhs = qr.q().transpose() * DVector::from_column_slice(y);
    let coef = qr.r().solve_upper_triangular(&rhs).expect("full rank");
    (0..n).map(|r| (0..=q).map(|c| a[(r, c)] * coef[c]).sum()).collect()
}

#[test]
fn linear_regression_matches_qr_oracle() {
    let x = normal(&mut rng(1), 200, 5);
    let noise = normal(&mut rng(2), 200, 1);
    let w = [0.5, -1.0, 2.0, 0.0, 0.25];
    let y: Vec<f64> = (0..200)
        .map(|r| 1.5 + x.row(r).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.1 * noise.get(r, 0))
        .collect();
    let fit = fit_linear_regression(&x, &Matrix::from_vec(200, 1, y.clone()).unwrap()).unwrap();
    let pred = fit.predict(&x).unwrap();
    let oracle = qr_oracle(&x, &y);
    let diff = common::max_abs_diff(pred.as_slice(), &oracle);
    assert!(diff < 1e-8, "max |Δ| = {diff:e}");

    // Residuals are orthogonal to every column and to the intercept.
    let resid: Vec<f64> = y.iter().zip(pred.as_slice()).map(|(a, b)| a - b).collect();
    assert!(resid.iter().sum::<f64>().abs() < 1e-8);
    for c in 0..5 {
        let dot: f64 = (0..200).map(|r| x.get(r, c) * resid[r]).sum();
        assert!(dot.abs() < 1e-7, "column {c}: {dot:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predictions_invariant_to_affine_column_rescaling(
        seed in 0u64..10_000, col in 0usize..4, scale in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3], shift in -1e3f64..1e3
    ) {
        let x = normal(&mut rng(seed), 60, 4);
        let y = normal(&mut rng(seed + 1), 60, 2);
        let base = fit_linear_regression(&x, &y).unwrap().predict(&x).unwrap();
        let mut xs = x.clone();
        for r in 0..60 {
            let v = xs.get(r, col);
            xs.set(r, col, scale * v + shift);
        }
        let moved = fit_linear_regression(&xs, &y).unwrap().predict(&xs).unwrap();
        let diff = common::max_abs_diff(base.as_slice(), moved.as_slice());
        prop_assert!(diff < 1e-8, "{diff:e}");
    }
}

#[test]
fn mlp_count_matches_allocation() {
    for (q, d, l, tau) in [(45, 7, 3, 1), (60, 3, 1, 12), (5, 2, 4, 2)] {
        let spec = MlpSpec {
            lookback: q,
            units: d,
            depth: l,
            horizon: tau,
        };
        let m = build_mlp(spec, 0).unwrap();
        assert_eq!(m.params().num_scalars(), mlp_parameter_count(&spec));
    }
}
