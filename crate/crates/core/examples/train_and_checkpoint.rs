//! Train a small STAN on a synthetic region, checkpoint it, reload and re-score.

use stanforge::bench::{fit_and_score, rmse_matrix, ModelSpec};
use stanforge::checkpoint::{AnyModel, Checkpoint};
use stanforge::data::{lookback_for, prepare_run, SplitConfig};
use stanforge::fixtures::synthetic_load;
use stanforge::training::TrainConfig;

pub fn run_example() -> stanforge::Result<()> {
    let series = synthetic_load("DAYTON", 1500, 7);
    let horizon = 6;
    let data = prepare_run(&series.values, lookback_for(horizon), horizon, &SplitConfig::default(), 7)?;
    let cfg = TrainConfig {
        max_epochs: 30,
        ..TrainConfig::default()
    };

    let fit = fit_and_score(&ModelSpec::stan(16, 2), &data, &cfg, 7)?;
    if let Some(history) = &fit.history {
        for r in history.records.iter().step_by(5) {
            println!(
                "epoch {:>3}  train {:.5}  val {:.5}  lr {:.2e}",
                r.epoch, r.train_loss, r.val_loss, r.lr
            );
        }
    }
    println!("test RMSE {:.5} with {} parameters", fit.test_rmse, fit.model.num_parameters());

    let path = std::env::temp_dir().join("stanforge-example-checkpoint.json");
    fit.model.to_checkpoint(Some(data.scaler)).save(&path)?;
    let restored = AnyModel::from_checkpoint(&Checkpoint::load(&path)?)?;
    let again = rmse_matrix(&data.test.targets, &restored.predict(&data.test.inputs)?)?;
    println!("reloaded from {}: test RMSE {:.5}", path.display(), again);
    assert_eq!(again.to_bits(), fit.test_rmse.to_bits());
    Ok(())
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example()
}
