//! Gap filling and outlier flagging for one sorted record stream. Outliers
//! are flagged, never removed: the extreme values are exactly the flood
//! peaks the downstream models need to see.

use super::TimeSeriesRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleanRules {
    /// Longest run of consecutive missing values forward-filled; longer
    /// runs are dropped instead of fabricating hydrology.
    pub max_gap_fill: usize,
    /// Boxplot fence multiplier on the interquartile range.
    pub iqr_factor: f64,
}

impl Default for CleanRules {
    fn default() -> Self {
        CleanRules {
            max_gap_fill: 3,
            iqr_factor: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CleanLog {
    /// (timestamp, filled value) per forward-filled record.
    pub fills: Vec<(chrono::NaiveDateTime, f64)>,
    /// Timestamps of dropped records (long gaps, leading missing run).
    pub dropped: Vec<chrono::NaiveDateTime>,
    pub outlier_count: usize,
}

/// Fully valued stream plus per-record outlier flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanedSeries {
    pub records: Vec<TimeSeriesRecord>,
    pub outlier_flags: Vec<bool>,
    pub log: CleanLog,
}

impl CleanedSeries {
    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value.unwrap_or(f64::NAN)).collect()
    }

    pub fn timestamps(&self) -> Vec<chrono::NaiveDateTime> {
        self.records.iter().map(|r| r.timestamp).collect()
    }
}

/// Quantile of a sorted slice by linear interpolation between order
/// statistics: rank h = (n−1)q, result = v[⌊h⌋] + frac·(v[⌊h⌋+1] − v[⌊h⌋]).
pub fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Tukey fences at factor×IQR with interpolated quartiles. IQR of zero
/// means no flags at all, so constant streams never alarm.
pub fn iqr_outlier_flags(values: &[f64], factor: f64) -> Vec<bool> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let q1 = quantile_linear(&sorted, 0.25);
    let q3 = quantile_linear(&sorted, 0.75);
    let iqr = q3 - q1;
    if iqr == 0.0 {
        return vec![false; values.len()];
    }
    let lo = q1 - factor * iqr;
    let hi = q3 + factor * iqr;
    values.iter().map(|&v| v < lo || v > hi).collect()
}

/// Forward-fill short gaps, drop long ones, flag outliers. Idempotent on
/// its own output: a cleaned stream has no missing values, so a second
/// pass reproduces identical records and flags.
pub fn clean_series(records: &[TimeSeriesRecord], rules: &CleanRules) -> Result<CleanedSeries> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let station = &records[0].station_id;
    let variable = records[0].variable;
    for pair in records.windows(2) {
        if pair[0].station_id != pair[1].station_id || pair[0].variable != pair[1].variable {
            return Err(Error::Config(
                "clean_series expects a single (station, variable) stream".into(),
            ));
        }
        if pair[0].timestamp >= pair[1].timestamp {
            return Err(Error::Config(
                "clean_series expects strictly increasing timestamps".into(),
            ));
        }
    }
    let _ = (station, variable);

    let mut log = CleanLog::default();
    let mut kept: Vec<TimeSeriesRecord> = Vec::with_capacity(records.len());
    let mut last_value: Option<f64> = None;
    let mut index = 0;
    while index < records.len() {
        let record = &records[index];
        match record.value {
            Some(v) => {
                if !v.is_finite() {
                    return Err(Error::Config(format!(
                        "non-finite value at {}",
                        record.timestamp
                    )));
                }
                last_value = Some(v);
                kept.push(record.clone());
                index += 1;
            }
            None => {
                let gap_start = index;
                while index < records.len() && records[index].value.is_none() {
                    index += 1;
                }
                let gap = index - gap_start;
                match last_value {
                    Some(fill) if gap <= rules.max_gap_fill => {
                        for r in &records[gap_start..index] {
                            log.fills.push((r.timestamp, fill));
                            kept.push(TimeSeriesRecord {
                                value: Some(fill),
                                ..r.clone()
                            });
                        }
                    }
                    _ => {
                        // Long gap, or missing run before any observation.
                        for r in &records[gap_start..index] {
                            log.dropped.push(r.timestamp);
                        }
                    }
                }
            }
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyInput);
    }

    let values: Vec<f64> = kept.iter().map(|r| r.value.unwrap()).collect();
    let outlier_flags = iqr_outlier_flags(&values, rules.iqr_factor);
    log.outlier_count = outlier_flags.iter().filter(|&&f| f).count();

    Ok(CleanedSeries {
        records: kept,
        outlier_flags,
        log,
    })
}
