//! RMSE scoring, the benchmark matrix and its reports.

mod plan;
mod report;
mod runner;

pub use plan::{BenchmarkPlan, DatasetSource, ModelSpec};
pub use report::{
    aggregate, write_all_reports, write_report, CellStats, CellValue, Report, ReportFormat, ReportRow, ValueTable,
    MEAN_CSV, REPORT_MD, RESULTS_JSON, STD_CSV, TIME_CSV,
};
pub use runner::{fit_and_score, rmse, rmse_matrix, run_benchmark, FittedRun, RunResult};
