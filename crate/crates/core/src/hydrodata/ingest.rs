//! CSV ingestion with a configurable column mapping. Unparseable rows land
//! in a rejects report with a reason code instead of being dropped
//! silently; missing values are kept on the record and logged.

use std::collections::BTreeMap;
use std::io::Write as IoWrite;
use std::path::Path;

use chrono::NaiveDateTime;

use super::{TimeSeriesRecord, Variable};
use crate::error::{Error, Result};

/// Column mapping plus the dialect switches German portal exports need
/// (`;` delimiter, decimal comma, `DD.MM.YYYY HH:MM` timestamps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub delimiter: u8,
    /// Parse `3,14` as 3.14.
    pub decimal_comma: bool,
    /// Parse `DD.MM.YYYY HH:MM` instead of ISO-8601.
    pub day_first_dates: bool,
    pub timestamp_col: String,
    pub value_col: String,
    /// Station column; absent means every row gets `default_station`.
    pub station_col: Option<String>,
    /// Variable column; absent means every row gets `default_variable`.
    pub variable_col: Option<String>,
    pub default_station: String,
    pub default_variable: Variable,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            delimiter: b',',
            decimal_comma: false,
            day_first_dates: false,
            timestamp_col: "timestamp".into(),
            value_col: "value".into(),
            station_col: Some("station_id".into()),
            variable_col: Some("variable".into()),
            default_station: "station-01".into(),
            default_variable: Variable::WaterLevelCm,
        }
    }
}

/// One rejected input row with the reason code and the raw line content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedRow {
    /// 1-based data row number (header excluded).
    pub row_number: usize,
    pub reason: String,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    /// Sorted by (station, variable, timestamp); strictly increasing
    /// timestamps within each stream.
    pub records: Vec<TimeSeriesRecord>,
    pub rejects: Vec<RejectedRow>,
    /// Human-readable notes: missing values, sort fixes.
    pub log: Vec<String>,
}

impl IngestReport {
    /// Streams keyed by (station, variable), in deterministic key order.
    pub fn streams(&self) -> BTreeMap<(String, Variable), Vec<TimeSeriesRecord>> {
        let mut map: BTreeMap<(String, Variable), Vec<TimeSeriesRecord>> = BTreeMap::new();
        for r in &self.records {
            map.entry((r.station_id.clone(), r.variable))
                .or_default()
                .push(r.clone());
        }
        map
    }

    pub fn write_rejects<W: IoWrite>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "row,reason,raw")?;
        for r in &self.rejects {
            writeln!(out, "{},{},\"{}\"", r.row_number, r.reason, r.raw.replace('"', "'"))?;
        }
        Ok(())
    }
}

fn parse_timestamp(text: &str, day_first: bool) -> Option<NaiveDateTime> {
    let t = text.trim();
    let formats: &[&str] = if day_first {
        &["%d.%m.%Y %H:%M:%S", "%d.%m.%Y %H:%M"]
    } else {
        &[
            "%Y-%m-%dT%H:%M:%S",
            "%Y-%m-%d %H:%M:%S",
            "%Y-%m-%dT%H:%M",
            "%Y-%m-%d %H:%M",
        ]
    };
    for f in formats {
        if let Ok(ts) = NaiveDateTime::parse_from_str(t, f) {
            return Some(ts);
        }
    }
    // Date-only rows resolve to midnight.
    let date_format = if day_first { "%d.%m.%Y" } else { "%Y-%m-%d" };
    chrono::NaiveDate::parse_from_str(t, date_format)
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
}

/// Missing-value spellings accepted on the value column.
fn is_missing(text: &str) -> bool {
    matches!(text.trim(), "" | "NaN" | "nan" | "NA" | "na" | "-")
}

fn parse_value(text: &str, decimal_comma: bool) -> Option<f64> {
    let t = text.trim();
    let normalized = if decimal_comma { t.replace(',', ".") } else { t.to_string() };
    normalized.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parse a CSV file into sorted record streams. Rejects: missing mapped
/// columns, bad timestamps, unknown variables, unparseable values, and
/// duplicate timestamps within a stream (the later file occurrence loses).
/// More than half the data rows rejected fails the whole file.
pub fn ingest_csv(path: &Path, schema: &CsvSchema) -> Result<IngestReport> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| Error::Format {
            reason: format!("unreadable header: {e}"),
            samples: vec![],
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let ts_col = col(&schema.timestamp_col).ok_or_else(|| Error::Format {
        reason: format!("timestamp column `{}` not in header", schema.timestamp_col),
        samples: vec![headers.iter().collect::<Vec<_>>().join(",")],
    })?;
    let value_col = col(&schema.value_col).ok_or_else(|| Error::Format {
        reason: format!("value column `{}` not in header", schema.value_col),
        samples: vec![headers.iter().collect::<Vec<_>>().join(",")],
    })?;
    let station_col = match &schema.station_col {
        Some(name) => Some(col(name).ok_or_else(|| Error::Format {
            reason: format!("station column `{name}` not in header"),
            samples: vec![],
        })?),
        None => None,
    };
    let variable_col = match &schema.variable_col {
        Some(name) => Some(col(name).ok_or_else(|| Error::Format {
            reason: format!("variable column `{name}` not in header"),
            samples: vec![],
        })?),
        None => None,
    };

    let mut parsed: Vec<(usize, TimeSeriesRecord)> = Vec::new();
    let mut rejects: Vec<RejectedRow> = Vec::new();
    let mut log: Vec<String> = Vec::new();
    let mut row_number = 0usize;

    for row in reader.records() {
        row_number += 1;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                rejects.push(RejectedRow {
                    row_number,
                    reason: "malformed_row".into(),
                    raw: e.to_string(),
                });
                continue;
            }
        };
        let raw = row.iter().collect::<Vec<_>>().join(",");
        let fields_needed = [Some(ts_col), Some(value_col), station_col, variable_col]
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or(0);
        if row.len() <= fields_needed {
            rejects.push(RejectedRow {
                row_number,
                reason: "missing_column".into(),
                raw,
            });
            continue;
        }
        let timestamp = match parse_timestamp(&row[ts_col], schema.day_first_dates) {
            Some(ts) => ts,
            None => {
                rejects.push(RejectedRow {
                    row_number,
                    reason: "bad_timestamp".into(),
                    raw,
                });
                continue;
            }
        };
        let station_id = match station_col {
            Some(c) => row[c].trim().to_string(),
            None => schema.default_station.clone(),
        };
        let variable = match variable_col {
            Some(c) => match Variable::parse(&row[c]) {
                Some(v) => v,
                None => {
                    rejects.push(RejectedRow {
                        row_number,
                        reason: "unknown_variable".into(),
                        raw,
                    });
                    continue;
                }
            },
            None => schema.default_variable,
        };
        let value_text = &row[value_col];
        let value = if is_missing(value_text) {
            log.push(format!(
                "row {row_number}: missing value at {timestamp} ({station_id}/{})",
                variable.name()
            ));
            None
        } else {
            match parse_value(value_text, schema.decimal_comma) {
                Some(v) => Some(v),
                None => {
                    rejects.push(RejectedRow {
                        row_number,
                        reason: "bad_value".into(),
                        raw,
                    });
                    continue;
                }
            }
        };
        parsed.push((
            row_number,
            TimeSeriesRecord {
                timestamp,
                station_id,
                variable,
                value,
            },
        ));
    }

    // Per-stream ordering: stable sort keeps file order among equal
    // timestamps, so the first occurrence survives and later duplicates
    // are rejected.
    parsed.sort_by(|a, b| {
        (&a.1.station_id, a.1.variable, a.1.timestamp).cmp(&(
            &b.1.station_id,
            b.1.variable,
            b.1.timestamp,
        ))
    });
    let mut records: Vec<TimeSeriesRecord> = Vec::with_capacity(parsed.len());
    for (line, record) in parsed {
        let duplicate = records.last().map_or(false, |prev: &TimeSeriesRecord| {
            prev.station_id == record.station_id
                && prev.variable == record.variable
                && prev.timestamp == record.timestamp
        });
        if duplicate {
            rejects.push(RejectedRow {
                row_number: line,
                reason: "duplicate_timestamp".into(),
                raw: format!(
                    "{},{},{}",
                    record.timestamp,
                    record.station_id,
                    record.variable.name()
                ),
            });
        } else {
            records.push(record);
        }
    }
    rejects.sort_by_key(|r| r.row_number);

    let total_rows = records.len() + rejects.len();
    if total_rows > 0 && rejects.len() * 2 > total_rows {
        let samples: Vec<String> = rejects
            .iter()
            .take(5)
            .map(|r| format!("row {}: {} ({})", r.row_number, r.raw, r.reason))
            .collect();
        return Err(Error::Format {
            reason: format!(
                "{} of {} data rows rejected, file considered unusable",
                rejects.len(),
                total_rows
            ),
            samples,
        });
    }

    Ok(IngestReport {
        records,
        rejects,
        log,
    })
}

/// Canonical-schema CSV writer (`timestamp,station_id,variable,value`,
/// ISO timestamps, empty field for missing values). Output re-ingests
/// under `CsvSchema::default()`.
pub fn write_records_csv<W: IoWrite>(records: &[TimeSeriesRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "timestamp,station_id,variable,value")?;
    for r in records {
        let value = match r.value {
            Some(v) => format!("{v}"),
            None => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{}",
            r.timestamp.format("%Y-%m-%dT%H:%M:%S"),
            r.station_id,
            r.variable.name(),
            value
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn well_formed_rows_all_ingested() {
        let f = write_temp(
            "timestamp,station_id,variable,value\n\
             2021-01-01T00:00:00,s1,water_level_cm,35.0\n\
             2021-01-02T00:00:00,s1,water_level_cm,36.5\n\
             2021-01-03T00:00:00,s1,water_level_cm,37.0\n",
        );
        let report = ingest_csv(f.path(), &CsvSchema::default()).unwrap();
        assert_eq!(report.records.len(), 3);
        assert!(report.rejects.is_empty());
        assert_eq!(report.records[1].value, Some(36.5));
    }

    #[test]
    fn nan_value_becomes_missing_and_is_logged() {
        let f = write_temp(
            "timestamp,station_id,variable,value\n\
             2021-01-01T00:00:00,s1,water_level_cm,NaN\n",
        );
        let report = ingest_csv(f.path(), &CsvSchema::default()).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].value, None);
        assert_eq!(report.log.len(), 1);
        assert!(report.rejects.is_empty());
    }

    #[test]
    fn duplicate_timestamp_rejects_second_occurrence() {
        let f = write_temp(
            "timestamp,station_id,variable,value\n\
             2021-01-01T00:00:00,s1,water_level_cm,35.0\n\
             2021-01-01T00:00:00,s1,water_level_cm,99.0\n",
        );
        let report = ingest_csv(f.path(), &CsvSchema::default()).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].value, Some(35.0));
        assert_eq!(report.rejects.len(), 1);
        assert_eq!(report.rejects[0].reason, "duplicate_timestamp");
        assert_eq!(report.rejects[0].row_number, 2);
    }

    #[test]
    fn german_dialect_parses_semicolon_decimal_comma_and_day_first() {
        let f = write_temp(
            "timestamp;station_id;variable;value\n\
             02.01.2021 06:30;s1;water_level_cm;36,5\n\
             01.01.2021 06:30;s1;water_level_cm;35,0\n",
        );
        let schema = CsvSchema {
            delimiter: b';',
            decimal_comma: true,
            day_first_dates: true,
            ..CsvSchema::default()
        };
        let report = ingest_csv(f.path(), &schema).unwrap();
        assert_eq!(report.records.len(), 2);
        // Sorted into chronological order.
        assert_eq!(report.records[0].value, Some(35.0));
        assert_eq!(report.records[1].value, Some(36.5));
        assert_eq!(report.records[0].timestamp.format("%Y-%m-%d").to_string(), "2021-01-01");
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = ingest_csv(Path::new("/nonexistent/f.csv"), &CsvSchema::default()).unwrap_err();
        assert!(matches!(err, crate::Error::Io { .. }));
    }

    #[test]
    fn mostly_broken_file_fails_with_samples() {
        let f = write_temp(
            "timestamp,station_id,variable,value\n\
             2021-01-01T00:00:00,s1,water_level_cm,35.0\n\
             not-a-date,s1,water_level_cm,1\n\
             also-bad,s1,water_level_cm,2\n\
             worse,s1,water_level_cm,3\n",
        );
        let err = ingest_csv(f.path(), &CsvSchema::default()).unwrap_err();
        match err {
            crate::Error::Format { samples, .. } => {
                assert!(!samples.is_empty());
                assert!(samples.len() <= 5);
            }
            other => panic!("expected Format error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_writer_round_trips() {
        let records = vec![
            TimeSeriesRecord {
                timestamp: chrono::NaiveDate::from_ymd_opt(2021, 1, 1)
                    .unwrap()
                    .and_hms_opt(0, 0, 0)
                    .unwrap(),
                station_id: "s1".into(),
                variable: Variable::WaterLevelCm,
                value: Some(35.25),
            },
            TimeSeriesRecord {
                timestamp: chrono::NaiveDate::from_ymd_opt(2021, 1, 2)
                    .unwrap()
                    .and_hms_opt(0, 0, 0)
                    .unwrap(),
                station_id: "s1".into(),
                variable: Variable::WaterLevelCm,
                value: None,
            },
        ];
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf).unwrap();
        let f = write_temp(std::str::from_utf8(&buf).unwrap());
        let report = ingest_csv(f.path(), &CsvSchema::default()).unwrap();
        assert_eq!(report.records, records);
    }
}
