//! Load a PJM-layout CSV, scale it and cut lookback windows.

use stanforge::data::{load_pjm_csv, lookback_for, prepare_run, SplitConfig, SplitMode};
use stanforge::fixtures::write_fixtures;

pub fn run_example() -> stanforge::Result<()> {
    let dir = std::env::temp_dir().join("stanforge-pjm-windows");
    let paths = write_fixtures(&dir, &["AEP".to_string()], 1000, 0)?;
    let (series, report) = load_pjm_csv(&paths[0], "AEP_MW")?;
    println!(
        "{}: {} hours from {} to {} ({} duplicates, {} missing dropped)",
        series.name,
        series.len(),
        series.timestamps[0],
        series.timestamps[series.len() - 1],
        report.duplicates_dropped,
        report.missing_dropped
    );

    for horizon in [1, 6, 12] {
        let q = lookback_for(horizon);
        for mode in [SplitMode::Random, SplitMode::Contiguous] {
            let split = SplitConfig { mode, ..SplitConfig::default() };
            let data = prepare_run(&series.values, q, horizon, &split, 0)?;
            println!(
                "h={horizon:>2} q={q} {mode:?}: train {} val {} test {}, scaler mean {:.1} std {:.1}",
                data.train.len(),
                data.val.len(),
                data.test.len(),
                data.scaler.mean,
                data.scaler.std
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example()
}
