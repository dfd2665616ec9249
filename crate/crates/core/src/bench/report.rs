use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::runner::RunResult;
use crate::error::{Error, Result};

/// Aggregate of one (horizon, dataset, model) cell over its runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub runs: usize,
    pub failed: usize,
    /// Mean test RMSE over the successful runs.
    pub mean: Option<f64>,
    /// Sample standard deviation (n - 1); 0 for a single run.
    pub std: Option<f64>,
    pub std_x100: Option<f64>,
    pub mean_seconds: Option<f64>,
    pub best: bool,
}

/// One printed value of a report table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue {
    Blank,
    Failed,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub horizon: usize,
    pub dataset: String,
    /// Aligned with [`Report::models`]; `None` for blank columns.
    pub cells: Vec<Option<CellStats>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub models: Vec<String>,
    pub rows: Vec<ReportRow>,
}

fn first_seen<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Groups results into rows by horizon then dataset, with one column per
/// model, all in order of first appearance. The strictly smallest mean in a
/// row is flagged as best; exact ties flag every tied cell.
pub fn aggregate(results: &[RunResult]) -> Report {
    let models = first_seen(results.iter().map(|r| r.model.clone()));
    let horizons = first_seen(results.iter().map(|r| r.horizon));
    let datasets = first_seen(results.iter().map(|r| r.dataset.clone()));
    let mut rows = Vec::new();
    for &h in &horizons {
        for ds in &datasets {
            let mut cells: Vec<Option<CellStats>> = models
                .iter()
                .map(|m| {
                    let runs: Vec<&RunResult> = results
                        .iter()
                        .filter(|r| r.horizon == h && &r.dataset == ds && &r.model == m)
                        .collect();
                    if runs.is_empty() {
                        return None;
                    }
                    let ok: Vec<f64> = runs.iter().filter_map(|r| r.test_rmse).collect();
                    let secs: Vec<f64> = runs
                        .iter()
                        .filter(|r| r.test_rmse.is_some())
                        .map(|r| r.train_seconds)
                        .collect();
                    let (mean, std, mean_seconds) = if ok.is_empty() {
                        (None, None, None)
                    } else {
                        let (m, s) = mean_std(&ok);
                        (Some(m), Some(s), Some(mean_std(&secs).0))
                    };
                    Some(CellStats {
                        runs: runs.len(),
                        failed: runs.len() - ok.len(),
                        mean,
                        std,
                        std_x100: std.map(|s| s * 100.0),
                        mean_seconds,
                        best: false,
                    })
                })
                .collect();
            if cells.iter().all(Option::is_none) {
                continue;
            }
            let best = cells
                .iter()
                .flatten()
                .filter_map(|c| c.mean)
                .fold(f64::INFINITY, f64::min);
            for c in cells.iter_mut().flatten() {
                c.best = c.mean == Some(best);
            }
            rows.push(ReportRow {
                horizon: h,
                dataset: ds.clone(),
                cells,
            });
        }
    }
    Report { models, rows }
}

impl Report {
    /// Adds empty columns for models that were not run.
    pub fn with_blank_columns(mut self, names: &[String]) -> Self {
        for n in names {
            if !self.models.contains(n) {
                self.models.push(n.clone());
                for r in &mut self.rows {
                    r.cells.push(None);
                }
            }
        }
        self
    }

    fn table(&self, pick: impl Fn(&CellStats) -> Option<f64>) -> ValueTable {
        ValueTable {
            models: self.models.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    let vals = r
                        .cells
                        .iter()
                        .map(|c| match c {
                            None => CellValue::Blank,
                            Some(s) => pick(s).map_or(CellValue::Failed, CellValue::Value),
                        })
                        .collect();
                    (r.horizon, r.dataset.clone(), vals)
                })
                .collect(),
        }
    }

    pub fn mean_table(&self) -> ValueTable {
        self.table(|c| c.mean)
    }

    pub fn std_x100_table(&self) -> ValueTable {
        self.table(|c| c.std_x100)
    }

    pub fn time_table(&self) -> ValueTable {
        self.table(|c| c.mean_seconds)
    }

    /// Table-1-style markdown: RMSE means to 3 decimals, best cell in bold.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "| steps ahead | dataset | {} |", self.models.join(" | "));
        let _ = writeln!(s, "|---|---|{}", "---|".repeat(self.models.len()));
        for r in &self.rows {
            let cells: Vec<String> = r
                .cells
                .iter()
                .map(|c| match c {
                    None => String::new(),
                    Some(st) => match st.mean {
                        None => "FAILED".to_string(),
                        Some(m) if st.best => format!("**{m:.3}**"),
                        Some(m) => format!("{m:.3}"),
                    },
                })
                .collect();
            let _ = writeln!(s, "| {} | {} | {} |", r.horizon, r.dataset, cells.join(" | "));
        }
        s
    }
}

/// A rectangular `(horizon, dataset) × model` table of printed values.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    pub models: Vec<String>,
    pub rows: Vec<(usize, String, Vec<CellValue>)>,
}

impl ValueTable {
    /// Header `horizon,dataset,<models…>`; values in shortest round-trip
    /// form, `FAILED` for failed cells and empty for blank ones.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["horizon".to_string(), "dataset".to_string()];
        header.extend(self.models.iter().cloned());
        w.write_record(&header)?;
        for (h, ds, vals) in &self.rows {
            let mut rec = vec![h.to_string(), ds.clone()];
            rec.extend(vals.iter().map(|v| match v {
                CellValue::Blank => String::new(),
                CellValue::Failed => "FAILED".to_string(),
                CellValue::Value(x) => x.to_string(),
            }));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.len() < 2 || header[0] != "horizon" || header[1] != "dataset" {
            return Err(Error::Config(format!("unexpected report header {header:?}")));
        }
        let models = header[2..].to_vec();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let bad = |v: &str| Error::Value {
                line: i + 2,
                value: v.to_string(),
            };
            let h: usize = rec[0].parse().map_err(|_| bad(&rec[0]))?;
            let vals = rec
                .iter()
                .skip(2)
                .map(|v| match v {
                    "" => Ok(CellValue::Blank),
                    "FAILED" => Ok(CellValue::Failed),
                    x => x.parse().map(CellValue::Value).map_err(|_| bad(x)),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((h, rec[1].to_string(), vals));
        }
        Ok(Self { models, rows })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

pub const MEAN_CSV: &str = "results_rmse_mean.csv";
pub const STD_CSV: &str = "results_rmse_std.csv";
pub const TIME_CSV: &str = "results_time.csv";
pub const RESULTS_JSON: &str = "results.json";
pub const REPORT_MD: &str = "report.md";

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes one report format into `dir`; returns the files written.
pub fn write_report(report: &Report, results: &[RunResult], dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(Error::Empty("report table"));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        ReportFormat::Csv => Ok(vec![
            write_file(dir.join(MEAN_CSV), &report.mean_table().to_csv()?)?,
            write_file(dir.join(STD_CSV), &report.std_x100_table().to_csv()?)?,
            write_file(dir.join(TIME_CSV), &report.time_table().to_csv()?)?,
        ]),
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(results)?;
            text.push('\n');
            Ok(vec![write_file(dir.join(RESULTS_JSON), &text)?])
        }
        ReportFormat::Markdown => Ok(vec![write_file(dir.join(REPORT_MD), &report.to_markdown())?]),
    }
}

pub fn write_all_reports(report: &Report, results: &[RunResult], dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for f in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Markdown] {
        out.extend(write_report(report, results, dir, f)?);
    }
    Ok(out)
}
