use proptest::prelude::*;
use stanforge::data::{
    fit_scaler, lookback_for, make_windows, prepare_run, split_runs, ScalerParams, SplitConfig, SplitMode,
    MIN_LOOKBACK,
};

fn series(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e4f64..1e4, len)
}

fn mode() -> impl Strategy<Value = SplitMode> {
    prop_oneof![Just(SplitMode::Random), Just(SplitMode::Contiguous)]
}

proptest! {
    #[test]
    fn lookback_rule_is_monotone_and_bounded(h in 1usize..500) {
        prop_assert!(lookback_for(h) >= MIN_LOOKBACK);
        prop_assert!(lookback_for(h + 1) >= lookback_for(h));
        prop_assert_eq!(lookback_for(h), MIN_LOOKBACK.max(5 * h));
    }

    #[test]
    fn split_is_a_seeded_permutation(n in 5usize..2000, seed in any::<u64>(), mode in mode()) {
        let cfg = SplitConfig { mode, ..SplitConfig::default() };
        let s = split_runs(n, &cfg, seed).unwrap();
        let mut all: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(s.test.len(), (0.2 * n as f64 - 1e-9).ceil() as usize);
        prop_assert_eq!(&split_runs(n, &cfg, seed).unwrap(), &s);
    }

    #[test]
    fn windows_align_with_source(values in series(20..200), q in 1usize..10, tau in 1usize..5) {
        let scaler = ScalerParams { mean: 3.0, std: 2.0 };
        let w = make_windows(&values, q, tau, &scaler).unwrap();
        prop_assert_eq!(w.len(), values.len() - q - tau + 1);
        for (i, &t) in w.anchors.iter().enumerate() {
            for (k, z) in w.inputs.row(i).iter().enumerate() {
                prop_assert!((scaler.invert(*z) - values[t - q + k]).abs() <= 1e-9 * (1.0 + values[t - q + k].abs()));
            }
            for (k, z) in w.targets.row(i).iter().enumerate() {
                prop_assert!((scaler.invert(*z) - values[t + k]).abs() <= 1e-9 * (1.0 + values[t + k].abs()));
            }
        }
    }

    #[test]
    fn scaler_round_trip(values in series(2..300)) {
        prop_assume!(values.iter().any(|v| *v != values[0]));
        let s = fit_scaler(&values).unwrap();
        for v in &values {
            prop_assert!((s.invert(s.apply(*v)) - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
        let z = s.apply_all(&values);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / z.len() as f64;
        prop_assert!(mean.abs() < 1e-9 && (var - 1.0).abs() < 1e-9);
    }

    /// Recomputes the scaler from the train-pool input values and checks that
    /// test windows are standardized with it.
    #[test]
    fn scaler_comes_from_train_pool_inputs(values in series(80..300), seed in any::<u64>(), mode in mode()) {
        let (q, tau) = (6, 2);
        let split = SplitConfig { mode, ..SplitConfig::default() };
        let data = prepare_run(&values, q, tau, &split, seed).unwrap();
        let raw = make_windows(&values, q, tau, &ScalerParams::IDENTITY).unwrap();
        let mut used = std::collections::BTreeSet::new();
        for i in data.split.train_pool() {
            let t = raw.anchors[i];
            used.extend(t - q..t);
        }
        let pool: Vec<f64> = used.iter().map(|&i| values[i]).collect();
        let expect = fit_scaler(&pool).unwrap();
        prop_assert!((expect.mean - data.scaler.mean).abs() <= 1e-9 * expect.mean.abs().max(1.0));
        prop_assert!((expect.std - data.scaler.std).abs() <= 1e-9 * expect.std);
        for (row, &i) in data.split.test.iter().enumerate() {
            let t = raw.anchors[i];
            prop_assert_eq!(data.test.anchors[row], t);
            let want = expect.apply(values[t]);
            prop_assert!((data.test.targets.get(row, 0) - want).abs() < 1e-9);
        }
    }
}

#[test]
fn hundred_windows_split_64_16_20() {
    let s = split_runs(100, &SplitConfig::default(), 1).unwrap();
    assert_eq!((s.train.len(), s.val.len(), s.test.len()), (64, 16, 20));
}

#[test]
fn contiguous_split_preserves_time_order() {
    let cfg = SplitConfig {
        mode: SplitMode::Contiguous,
        ..SplitConfig::default()
    };
    let s = split_runs(50, &cfg, 9).unwrap();
    let order: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
    assert_eq!(order, (0..50).collect::<Vec<_>>());
}
