//! Calendar time axis: boundary timestamps and the left-indexed intervals
//! between them, plus per-interval value series.
//!
//! Every timestamp labels the interval it *begins*. An axis with `N`
//! boundaries therefore has `N - 1` intervals, and interval lengths are free
//! to differ (the final boundary only closes the last interval).

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::milp::IntervalInfo;

/// Errors from time-axis construction and timestamp parsing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeError {
    /// The end of the horizon does not lie strictly after its start.
    #[error("time span is empty or negative: start {start}, end {end}")]
    NonPositiveSpan { start: NaiveDateTime, end: NaiveDateTime },
    /// The frequency string does not describe a positive duration.
    #[error("cannot parse frequency {0:?}: expected <positive integer><T|H|D|S>")]
    BadFrequency(String),
    /// A timestamp string is not in a supported format.
    #[error("cannot parse timestamp {0:?}: expected e.g. 2021-07-10 06:00:00")]
    BadTimestamp(String),
    /// Explicit boundary lists must be strictly increasing with >= 2 entries.
    #[error("boundaries must be strictly increasing with at least two entries")]
    BadBoundaries,
}

/// Parses a timestamp in `YYYY-MM-DD HH:MM[:SS]` form, with either a space
/// or a `T` separating date and time.
pub fn parse_timestamp(text: &str) -> Result<NaiveDateTime, TimeError> {
    let s = text.trim();
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(t);
        }
    }
    Err(TimeError::BadTimestamp(s.to_string()))
}

/// Parses a frequency such as `60T` (minutes), `1H`, `1D`, or `30S` into a
/// positive duration.
pub fn parse_frequency(freq: &str) -> Result<Duration, TimeError> {
    let s = freq.trim();
    let bad = || TimeError::BadFrequency(freq.to_string());
    if s.len() < 2 {
        return Err(bad());
    }
    let (digits, unit) = s.split_at(s.len() - 1);
    let n: i64 = digits.parse().map_err(|_| bad())?;
    if n <= 0 {
        return Err(bad());
    }
    match unit.to_ascii_uppercase().as_str() {
        "T" => Ok(Duration::minutes(n)),
        "H" => Ok(Duration::hours(n)),
        "D" => Ok(Duration::days(n)),
        "S" => Ok(Duration::seconds(n)),
        _ => Err(bad()),
    }
}

/// A sequence of boundary timestamps defining left-indexed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeIndex {
    freq: Option<String>,
    boundaries: Vec<NaiveDateTime>,
}

impl TimeIndex {
    /// Builds a regular axis stepping `freq` from `start` until `end`. When
    /// the final step overshoots, the last interval is clamped so the axis
    /// covers exactly `[start, end)`.
    pub fn build(
        start: NaiveDateTime,
        end: NaiveDateTime,
        freq: &str,
    ) -> Result<TimeIndex, TimeError> {
        if end <= start {
            return Err(TimeError::NonPositiveSpan { start, end });
        }
        let step = parse_frequency(freq)?;
        let mut boundaries = vec![start];
        let mut t = start;
        while t < end {
            t = t
                .checked_add_signed(step)
                .ok_or_else(|| TimeError::BadFrequency(freq.to_string()))?;
            if t > end {
                t = end;
            }
            boundaries.push(t);
        }
        Ok(TimeIndex { freq: Some(freq.trim().to_string()), boundaries })
    }

    /// As [`TimeIndex::build`] but with textual start/end timestamps.
    pub fn parse(start: &str, end: &str, freq: &str) -> Result<TimeIndex, TimeError> {
        TimeIndex::build(parse_timestamp(start)?, parse_timestamp(end)?, freq)
    }

    /// Builds an axis from explicit boundaries; interval lengths may differ.
    pub fn from_boundaries(boundaries: Vec<NaiveDateTime>) -> Result<TimeIndex, TimeError> {
        if boundaries.len() < 2 || boundaries.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TimeError::BadBoundaries);
        }
        Ok(TimeIndex { freq: None, boundaries })
    }

    pub fn start(&self) -> NaiveDateTime {
        self.boundaries[0]
    }

    pub fn end(&self) -> NaiveDateTime {
        *self.boundaries.last().expect("time index has boundaries")
    }

    /// The frequency string the axis was built from, if it was regular.
    pub fn freq(&self) -> Option<&str> {
        self.freq.as_deref()
    }

    pub fn boundaries(&self) -> &[NaiveDateTime] {
        &self.boundaries
    }

    pub fn num_intervals(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Length of interval `t` in hours.
    pub fn interval_hours(&self, t: usize) -> f64 {
        let span = self.boundaries[t + 1] - self.boundaries[t];
        span.num_seconds() as f64 / 3600.0
    }

    /// All intervals as (start, duration-in-hours) records.
    pub fn intervals(&self) -> Vec<IntervalInfo> {
        (0..self.num_intervals())
            .map(|t| IntervalInfo { start: self.boundaries[t], hours: self.interval_hours(t) })
            .collect()
    }
}

/// Per-interval values with an optional free-form unit annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    pub unit: Option<String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> TimeSeries {
        TimeSeries { values, unit: None }
    }

    pub fn with_unit(values: Vec<f64>, unit: impl Into<String>) -> TimeSeries {
        TimeSeries { values, unit: Some(unit.into()) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl From<Vec<f64>> for TimeSeries {
    fn from(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values)
    }
}
