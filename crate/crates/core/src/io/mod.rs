//! Random streams, the synthetic arrival generator, CSV/JSON persistence and
//! SVG rendering.

pub mod charts;
pub mod export;
pub mod rng;
pub mod synthetic;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forecast::ArrivalSeries;

pub use export::{export_metrics, read_manifest, read_metrics, Manifest, ManifestSummary};
pub use synthetic::{generate_synthetic, SyntheticSpec};

/// Writes through a sibling temp file and renames it into place, so a reader
/// never sees a half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::write(path, std::io::Error::other("no file name")))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| Error::write(path, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::write(path, e)
    })
}

/// Reads a headered CSV, checking the header exactly. Rows come back with
/// their 1-based file line numbers.
pub(crate) fn csv_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    csv_rows_from_str(&text, path, header)
}

pub(crate) fn csv_rows_from_str(text: &str, path: &Path, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let parse_err = |line: u64, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if found.iter().collect::<Vec<_>>() != header {
        return Err(parse_err(
            1,
            format!(
                "expected header `{}`, found `{}`",
                header.join(","),
                found.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record));
    }
    Ok(rows)
}

fn parse_hourly(path: &Path, text: &str, header: [&str; 2], from_zero: bool) -> Result<ArrivalSeries> {
    let rows = csv_rows_from_str(text, path, &header)?;
    let err = |line: u64, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut values = Vec::with_capacity(rows.len());
    let mut start = None;
    for (line, row) in rows {
        let hour: u64 = row[0]
            .parse()
            .map_err(|_| err(line, format!("hour `{}` is not a non-negative integer", &row[0])))?;
        let value: f64 = row[1]
            .parse()
            .map_err(|_| err(line, format!("{} `{}` is not a number", header[1], &row[1])))?;
        if !value.is_finite() || value < 0.0 {
            return Err(err(
                line,
                format!("{} must be a non-negative number, got {value}", header[1]),
            ));
        }
        let first = *start.get_or_insert(if from_zero { 0 } else { hour });
        let expected = first + values.len() as u64;
        if hour != expected {
            return Err(err(
                line,
                format!("gap in hour index: expected hour {expected}, found {hour}"),
            ));
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    ArrivalSeries::with_start(values, start.unwrap_or(0))
}

/// `hour,arrivals` CSV with hours contiguous from 0.
pub fn load_series(path: &Path) -> Result<ArrivalSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_hourly(path, &text, ["hour", "arrivals"], true)
}

/// `hour,predicted_arrivals` CSV as written by the forecaster; hours must be
/// contiguous but may start anywhere.
pub fn load_forecast(path: &Path) -> Result<ArrivalSeries> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_hourly(path, &text, ["hour", "predicted_arrivals"], false)
}

pub fn series_csv(series: &ArrivalSeries) -> String {
    hourly_csv("arrivals", series.start_hour(), series.values())
}

pub fn forecast_csv(start_hour: u64, values: &[f64]) -> String {
    hourly_csv("predicted_arrivals", start_hour, values)
}

fn hourly_csv(column: &str, start: u64, values: &[f64]) -> String {
    let mut out = format!("hour,{column}\n");
    for (k, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", start + k as u64, v));
    }
    out
}
