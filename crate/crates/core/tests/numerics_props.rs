mod common;

use proptest::prelude::*;
use stanforge::numerics::{
    adam_step, affine_backward, affine_forward, check_with_gradient, mse_loss, relu, AdamConfig, AdamState, Matrix,
    ParamStore,
};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3.0f64..3.0, rows * cols).prop_map(move |d| Matrix::from_vec(rows, cols, d).unwrap())
}

proptest! {
    #[test]
    fn relu_is_idempotent(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(relu(relu(x)), relu(x));
        prop_assert!(relu(x) >= 0.0);
    }

    #[test]
    fn mse_is_nonnegative_and_zero_only_on_equality(
        (a, b) in (1usize..6, 1usize..4).prop_flat_map(|(r, c)| (matrix(r, c), matrix(r, c)))
    ) {
        let (l, _) = mse_loss(&a, &b).unwrap();
        prop_assert!(l >= 0.0);
        prop_assert_eq!(l == 0.0, a == b);
        let (self_loss, grad) = mse_loss(&a, &a).unwrap();
        prop_assert_eq!(self_loss, 0.0);
        prop_assert!(grad.as_slice().iter().all(|g| *g == 0.0));
    }

    /// Holds for any step count and second moment while the first moment is
    /// zero; a non-zero first moment keeps moving the parameter.
    #[test]
    fn adam_with_zero_gradient_is_identity(
        params in prop::collection::vec(-10.0f64..10.0, 1..8),
        v in prop::collection::vec(0.0f64..1.0, 8),
        t in 0u64..1000,
    ) {
        let n = params.len();
        let mut state = AdamState::new(n, AdamConfig::default());
        state.t = t;
        state.v = v[..n].to_vec();
        let mut p = params.clone();
        adam_step("p", &mut p, &vec![0.0; n], &mut state).unwrap();
        prop_assert_eq!(&p, &params);
        prop_assert_eq!(state.t, t + 1);

        state.m = vec![0.5; n];
        adam_step("p", &mut p, &vec![0.0; n], &mut state).unwrap();
        prop_assert!(p.iter().zip(&params).all(|(a, b)| a < b));
    }

    #[test]
    fn affine_backward_on_random_shapes(
        (x, w, r) in (1usize..5, 1usize..5, 1usize..4)
            .prop_flat_map(|(m, p, d)| (matrix(m, p), matrix(p, d), matrix(m, d)))
    ) {
        let b = vec![0.1; w.cols()];
        let g = affine_backward(&x, &w, &r).unwrap();
        let mut store = ParamStore::new();
        store.push("x", x.clone());
        store.push("W", w.clone());
        let mut analytic = ParamStore::new();
        analytic.push("x", g.dx);
        analytic.push("W", g.dw);
        let loss = |s: &ParamStore| {
            let y = affine_forward(s.value(0), s.value(1), &b)?;
            Ok(y.as_slice().iter().zip(r.as_slice()).map(|(a, c)| a * c).sum())
        };
        let report = check_with_gradient(loss, &store, &analytic, 1e-5).unwrap();
        prop_assert!(report.max_relative_error < 1e-6, "{:?}", report);
        let db: Vec<f64> = r.col_sums();
        prop_assert!(common::max_abs_diff(&g.db, &db) < 1e-12);
    }
}
