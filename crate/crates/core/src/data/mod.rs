//! PJM-format ingestion, standard scaling, lookback windows and splits.

mod scaler;
mod series;
mod window;

pub use scaler::{fit_scaler, ScalerParams};
pub use series::{load_pjm_csv, LoadReport, TimeSeries, DATETIME_HEADER, TIMESTAMP_FORMAT};
pub use window::{
    lookback_for, make_windows, prepare_run, split_runs, PreparedData, SplitConfig, SplitIndices, SplitMode,
    WindowedDataset, MIN_LOOKBACK,
};
