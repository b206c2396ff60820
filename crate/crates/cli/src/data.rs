//! The shared data path: ingest configured CSV files or generate the
//! calibrated synthetic series, clean them, and assemble supervised
//! datasets. Commands differ only in what they do with the result.

use std::path::Path;

use hydroq_core::hydrodata::clean::{clean_series, CleanRules, CleanedSeries};
use hydroq_core::hydrodata::ingest::{ingest_csv, CsvSchema, IngestReport};
use hydroq_core::hydrodata::synth::synth_generate;
use hydroq_core::hydrodata::transform::{build_supervised, ExogSeries};
use hydroq_core::hydrodata::{HydroDataset, TargetKind, Variable};
use hydroq_core::{Error, Result};

use crate::config::{DataConfig, RunConfig};

pub struct LoadedData {
    pub level: CleanedSeries,
    pub precipitation: Option<CleanedSeries>,
    /// One ingest summary line per source file.
    pub log: Vec<String>,
}

fn schema_for(data: &DataConfig, variable: Variable) -> CsvSchema {
    CsvSchema {
        delimiter: data.delimiter.as_bytes()[0],
        decimal_comma: data.decimal_comma,
        day_first_dates: data.day_first_dates,
        timestamp_col: data.timestamp_col.clone(),
        value_col: data.value_col.clone(),
        station_col: data.station_col.clone(),
        variable_col: data.variable_col.clone(),
        default_station: data.default_station.clone(),
        default_variable: variable,
    }
}

/// Ingests one file and keeps the stream for the wanted variable.
pub fn ingest_variable(
    path: &Path,
    data: &DataConfig,
    variable: Variable,
) -> Result<(IngestReport, CleanedSeries)> {
    let report = ingest_csv(path, &schema_for(data, variable))?;
    let streams = report.streams();
    let records = streams
        .into_iter()
        .find(|((_, v), _)| *v == variable)
        .map(|(_, records)| records)
        .ok_or_else(|| {
            Error::Config(format!(
                "{} holds no {} records",
                path.display(),
                variable.name()
            ))
        })?;
    let cleaned = clean_series(&records, &CleanRules::default())?;
    Ok((report, cleaned))
}

pub fn load_data(config: &RunConfig) -> Result<LoadedData> {
    match &config.data {
        Some(data) => {
            let mut log = Vec::new();
            let (level_report, level) =
                ingest_variable(&data.level_path, data, Variable::WaterLevelCm)?;
            log.push(format!(
                "{}: {} records, {} rejected, {} filled, {} dropped, {} outliers flagged",
                data.level_path.display(),
                level.records.len(),
                level_report.rejects.len(),
                level.log.fills.len(),
                level.log.dropped.len(),
                level.log.outlier_count
            ));
            let precipitation = match &data.precipitation_path {
                Some(path) => {
                    let (report, cleaned) =
                        ingest_variable(path, data, Variable::PrecipitationMm)?;
                    log.push(format!(
                        "{}: {} records, {} rejected, {} filled, {} dropped, {} outliers flagged",
                        path.display(),
                        cleaned.records.len(),
                        report.rejects.len(),
                        cleaned.log.fills.len(),
                        cleaned.log.dropped.len(),
                        cleaned.log.outlier_count
                    ));
                    Some(cleaned)
                }
                None => None,
            };
            Ok(LoadedData {
                level,
                precipitation,
                log,
            })
        }
        None => {
            let calib = config.synth.to_calib(config.threshold_cm)?;
            let synth = synth_generate(config.seed, &calib)?;
            let level = clean_series(&synth.level, &CleanRules::default())?;
            let precipitation = clean_series(&synth.precipitation, &CleanRules::default())?;
            let log = vec![format!(
                "synthetic series: {} days from {}, seed {}",
                calib.days, calib.start_date, config.seed
            )];
            Ok(LoadedData {
                level,
                precipitation: Some(precipitation),
                log,
            })
        }
    }
}

/// Level and rain values restricted to their common timestamps, in order.
pub fn aligned_series(
    level: &CleanedSeries,
    precipitation: Option<&CleanedSeries>,
) -> (Vec<chrono::NaiveDateTime>, Vec<f64>, Option<Vec<f64>>) {
    let l_ts = level.timestamps();
    let l_vals = level.values();
    let Some(rain) = precipitation else {
        return (l_ts, l_vals, None);
    };
    let r_ts = rain.timestamps();
    let r_vals = rain.values();
    let mut timestamps = Vec::new();
    let mut levels = Vec::new();
    let mut rains = Vec::new();
    let mut j = 0;
    for (i, ts) in l_ts.iter().enumerate() {
        while j < r_ts.len() && r_ts[j] < *ts {
            j += 1;
        }
        if j < r_ts.len() && r_ts[j] == *ts {
            timestamps.push(*ts);
            levels.push(l_vals[i]);
            rains.push(r_vals[j]);
        }
    }
    (timestamps, levels, Some(rains))
}

/// Lagged supervised dataset for the configured task.
pub fn supervised_dataset(
    config: &RunConfig,
    data: &LoadedData,
    target_kind: TargetKind,
) -> Result<HydroDataset> {
    let (timestamps, levels, rains) = aligned_series(&data.level, data.precipitation.as_ref());
    let exogenous: Vec<ExogSeries> = match rains {
        Some(values) => vec![ExogSeries {
            name: "rain".into(),
            values,
        }],
        None => vec![],
    };
    build_supervised(
        &levels,
        &timestamps,
        &exogenous,
        config.lags,
        target_kind,
        config.threshold_cm,
    )
}
