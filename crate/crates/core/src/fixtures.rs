//! Small deterministic hourly-load series in the PJM CSV layout.

use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::TimeSeries;
use crate::error::{Error, Result};
use crate::rng::{rng_for, Stream};

/// Region names used when none are given.
pub const DEFAULT_REGIONS: [&str; 3] = ["AEP", "DAYTON", "PJME"];

/// Synthetic hourly load in MW: a regional base level, daily and weekly
/// cycles, and AR(1) noise. Each region draws from its own seed offset.
pub fn synthetic_load(name: &str, n: usize, seed: u64) -> TimeSeries {
    let offset = name.bytes().fold(0u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
    let mut rng = rng_for(seed ^ offset, Stream::Fixture);
    let base = 10_000.0 + rng.random_range(0.0..5_000.0);
    let daily = 0.15 * base;
    let weekly = 0.05 * base;
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let mut ar = 0.0;
    let values = (0..n)
        .map(|t| {
            let e: f64 = rng.sample(StandardNormal);
            ar = 0.8 * ar + 0.02 * base * e;
            let h = t as f64;
            let v = base
                + daily * (std::f64::consts::TAU * h / 24.0 + phase).sin()
                + weekly * (std::f64::consts::TAU * h / 168.0).sin()
                + ar;
            v.round()
        })
        .collect();
    TimeSeries::hourly(name, values)
}

/// Writes `<NAME>_hourly.csv` for each region into `dir`.
pub fn write_fixtures(dir: &Path, regions: &[String], n: usize, seed: u64) -> Result<Vec<PathBuf>> {
    if regions.is_empty() {
        return Err(Error::Empty("fixture regions"));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    regions
        .iter()
        .map(|r| {
            let path = dir.join(format!("{r}_hourly.csv"));
            synthetic_load(r, n, seed).write_pjm_csv(&path)?;
            Ok(path)
        })
        .collect()
}
