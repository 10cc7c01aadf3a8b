//! Resolution of CSV-referenced time series.
//!
//! A referenced file is a CSV document whose first column holds ISO-8601
//! timestamps and whose data columns are addressed by exact header match
//! (including any units text). Values are left-indexed: the row at each
//! interval-start boundary carries that interval's value, and the row at
//! the final boundary must carry `NaN` — it closes the last interval and is
//! consumed as an end marker, not as data.

use std::io;
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use thiserror::Error;

use crate::model::time::parse_timestamp;
use crate::model::{TimeIndex, TimeSeries};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series file not found: {}", path.display())]
    FileNotFound { path: PathBuf },
    #[error("{}: {message}", path.display())]
    Unreadable { path: PathBuf, message: String },
    #[error("{}: column {column:?} not found (available: {available})", path.display())]
    ColumnNotFound { path: PathBuf, column: String, available: String },
    #[error(
        "{}: row {row}: timestamp {found:?} does not match the expected boundary {expected}",
        path.display()
    )]
    TimestampMismatch { path: PathBuf, row: usize, found: String, expected: NaiveDateTime },
    #[error(
        "{}: row {row}, column {column:?}: cannot use {value:?} as a number",
        path.display()
    )]
    NonNumericValue { path: PathBuf, row: usize, column: String, value: String },
    #[error(
        "{}: the row at the final boundary {expected} must carry NaN in column {column:?} \
         to close the last interval",
        path.display()
    )]
    MissingNaNTerminator { path: PathBuf, expected: NaiveDateTime, column: String },
}

/// Extracts a units annotation like `temperature (°C)` → `°C` from a column
/// header, if present.
fn unit_from_header(column: &str) -> Option<String> {
    let trimmed = column.trim();
    let open = trimmed.rfind(" (")?;
    trimmed
        .ends_with(')')
        .then(|| trimmed[open + 2..trimmed.len() - 1].to_string())
        .filter(|unit| !unit.is_empty())
}

/// Reads the series in `column` of the CSV file at `path`, aligned to the
/// boundaries of `index`.
pub fn resolve_csv_series(
    path: &Path,
    column: &str,
    index: &TimeIndex,
) -> Result<TimeSeries, SeriesError> {
    let unreadable = |message: String| SeriesError::Unreadable {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(io_err) if io_err.kind() == io::ErrorKind::NotFound => {
                SeriesError::FileNotFound { path: path.to_path_buf() }
            }
            _ => unreadable(e.to_string()),
        })?;
    let headers = reader.headers().map_err(|e| unreadable(e.to_string()))?.clone();
    let data_column = headers.iter().position(|h| h == column).ok_or_else(|| {
        SeriesError::ColumnNotFound {
            path: path.to_path_buf(),
            column: column.to_string(),
            available: headers.iter().skip(1).collect::<Vec<_>>().join(", "),
        }
    })?;
    if data_column == 0 {
        return Err(unreadable(format!(
            "column {column:?} is the timestamp column; data columns start at the second column"
        )));
    }

    let boundaries = index.boundaries();
    let last = boundaries.len() - 1;
    let mut rows = reader.records();
    let mut values = Vec::with_capacity(last);
    for (i, &boundary) in boundaries.iter().enumerate() {
        // 1-based file row: the header is row 1, data starts at row 2.
        let row = i + 2;
        let record = match rows.next() {
            Some(Ok(record)) => record,
            Some(Err(e)) => return Err(unreadable(e.to_string())),
            None if i == last => {
                return Err(SeriesError::MissingNaNTerminator {
                    path: path.to_path_buf(),
                    expected: boundary,
                    column: column.to_string(),
                })
            }
            None => {
                return Err(SeriesError::TimestampMismatch {
                    path: path.to_path_buf(),
                    row,
                    found: "<end of file>".to_string(),
                    expected: boundary,
                })
            }
        };
        let stamp_text = record.get(0).unwrap_or("");
        let mismatch = || SeriesError::TimestampMismatch {
            path: path.to_path_buf(),
            row,
            found: stamp_text.to_string(),
            expected: boundary,
        };
        let stamp = parse_timestamp(stamp_text).map_err(|_| mismatch())?;
        if stamp != boundary {
            return Err(mismatch());
        }
        let raw = record
            .get(data_column)
            .ok_or_else(|| unreadable(format!("row {row} has only {} fields", record.len())))?;
        let value: f64 = raw.parse().map_err(|_| SeriesError::NonNumericValue {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            value: raw.to_string(),
        })?;
        if i == last {
            if !value.is_nan() {
                return Err(SeriesError::MissingNaNTerminator {
                    path: path.to_path_buf(),
                    expected: boundary,
                    column: column.to_string(),
                });
            }
        } else {
            // NaN is reserved for the end marker; it is not data.
            if value.is_nan() {
                return Err(SeriesError::NonNumericValue {
                    path: path.to_path_buf(),
                    row,
                    column: column.to_string(),
                    value: raw.to_string(),
                });
            }
            values.push(value);
        }
    }
    Ok(TimeSeries { values, unit: unit_from_header(column) })
}
