//! A reduced benchmark matrix over synthetic regions, written as reports.
//!
//! Pass PJM CSV paths to run on real files instead:
//!
//! ```text
//! cargo run --release --example benchmark_desk -- AEP_hourly.csv DAYTON_hourly.csv
//! ```

use std::path::PathBuf;

use stanforge::bench::{aggregate, run_benchmark, write_all_reports, BenchmarkPlan, DatasetSource};
use stanforge::fixtures::write_fixtures;

/// Runs on `args` if given, otherwise on two generated regions.
pub fn run_example(args: Vec<PathBuf>) -> stanforge::Result<()> {
    let out = std::env::temp_dir().join("stanforge-benchmark-desk");
    let datasets = if args.is_empty() {
        write_fixtures(&out.join("data"), &["AEP".into(), "PJME".into()], 1200, 0)?
            .into_iter()
            .zip(["AEP", "PJME"])
            .map(|(path, name)| DatasetSource {
                name: name.into(),
                path,
                column: format!("{name}_MW"),
            })
            .collect()
    } else {
        args.into_iter()
            .map(|path| {
                let name = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("REGION")
                    .trim_end_matches("_hourly")
                    .to_string();
                DatasetSource {
                    column: format!("{name}_MW"),
                    name,
                    path,
                }
            })
            .collect()
    };

    let mut plan = BenchmarkPlan::desk_scale(datasets, vec![1, 6], 0);
    plan.runs = 2;
    plan.train.max_epochs = 10;
    println!("lookbacks {:?}", plan.lookbacks());
    let results = run_benchmark(&plan, None)?;
    let report = aggregate(&results).with_blank_columns(&plan.blank_columns);
    print!("{}", report.to_markdown());
    for path in write_all_reports(&report, &results, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> stanforge::Result<()> {
    run_example(std::env::args().skip(1).map(PathBuf::from).collect())
}
