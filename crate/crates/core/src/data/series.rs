use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use serde::Serialize;

use crate::error::{Error, Result};

pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";
pub const DATETIME_HEADER: &str = "Datetime";

/// Named, time-ordered scalar observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub name: String,
    pub timestamps: Vec<NaiveDateTime>,
    pub values: Vec<f64>,
}

/// What `load_pjm_csv` dropped on the way in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub duplicates_dropped: usize,
    pub missing_dropped: usize,
}

impl TimeSeries {
    /// Hourly timestamps from 2000-01-01 00:00:00, for generated data.
    pub fn hourly(name: impl Into<String>, values: Vec<f64>) -> Self {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1)
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .expect("valid epoch");
        let timestamps = (0..values.len())
            .map(|i| start + Duration::hours(i as i64))
            .collect();
        Self {
            name: name.into(),
            timestamps,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes the series as `Datetime,<NAME>_MW`.
    pub fn write_pjm_csv(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = String::with_capacity(self.len() * 32);
        buf.push_str(&format!("{DATETIME_HEADER},{}_MW\n", self.name));
        for (t, v) in self.timestamps.iter().zip(&self.values) {
            buf.push_str(&format!("{},{}\n", t.format(TIMESTAMP_FORMAT), v));
        }
        f.write_all(buf.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Loads one region file in the Kaggle PJM layout.
///
/// Rows are sorted by timestamp; for repeated timestamps the first row in file
/// order is kept. Rows whose value field is empty (or `NA`/`NaN`) are dropped.
pub fn load_pjm_csv(path: &Path, column: &str) -> Result<(TimeSeries, LoadReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| Error::MissingColumn {
        column: name.to_string(),
        available: headers.clone(),
    };
    let ts_col = find(DATETIME_HEADER).ok_or_else(|| missing(DATETIME_HEADER))?;
    let val_col = find(column).ok_or_else(|| missing(column))?;

    let mut report = LoadReport::default();
    let mut rows: Vec<(NaiveDateTime, f64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        report.rows_read += 1;
        let ts_raw = record.get(ts_col).unwrap_or("");
        let ts = NaiveDateTime::parse_from_str(ts_raw, TIMESTAMP_FORMAT).map_err(|_| Error::Timestamp {
            line,
            value: ts_raw.to_string(),
        })?;
        let raw = record.get(val_col).unwrap_or("");
        if raw.is_empty() || raw.eq_ignore_ascii_case("na") || raw.eq_ignore_ascii_case("nan") {
            report.missing_dropped += 1;
            continue;
        }
        let v: f64 = raw.parse().map_err(|_| Error::Value {
            line,
            value: raw.to_string(),
        })?;
        if !v.is_finite() {
            report.missing_dropped += 1;
            continue;
        }
        rows.push((ts, v));
    }
    rows.sort_by_key(|r| r.0);
    let before = rows.len();
    rows.dedup_by_key(|r| r.0);
    report.duplicates_dropped = before - rows.len();
    if rows.is_empty() {
        return Err(Error::Empty("no usable rows in CSV"));
    }
    if report.duplicates_dropped + report.missing_dropped > 0 {
        log::warn!(
            "{}: dropped {} duplicate and {} missing rows",
            path.display(),
            report.duplicates_dropped,
            report.missing_dropped
        );
    }
    let name = column.strip_suffix("_MW").unwrap_or(column).to_string();
    let (timestamps, values) = rows.into_iter().unzip();
    Ok((
        TimeSeries {
            name,
            timestamps,
            values,
        },
        report,
    ))
}
