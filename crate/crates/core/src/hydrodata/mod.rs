//! Hydrological data pipeline: CSV ingestion, gap filling and outlier
//! flagging, flood labeling, scaling, chronological splitting, lag-window
//! supervised construction, summary statistics, and a calibrated synthetic
//! generator standing in for the external data portal.

pub mod clean;
pub mod eda;
pub mod ingest;
pub mod synth;
pub mod transform;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};

/// Measured quantity carried by one record stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    WaterLevelCm,
    PrecipitationMm,
    PrecipitationFormCode,
}

impl Variable {
    pub fn parse(text: &str) -> Option<Variable> {
        match text.trim() {
            "water_level_cm" => Some(Variable::WaterLevelCm),
            "precipitation_mm" => Some(Variable::PrecipitationMm),
            "precipitation_form_code" => Some(Variable::PrecipitationFormCode),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variable::WaterLevelCm => "water_level_cm",
            Variable::PrecipitationMm => "precipitation_mm",
            Variable::PrecipitationFormCode => "precipitation_form_code",
        }
    }
}

/// One observation in a (station, variable) stream. A record can carry a
/// missing value; cleaning removes or fills those.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub timestamp: NaiveDateTime,
    pub station_id: String,
    pub variable: Variable,
    pub value: Option<f64>,
}

/// What the supervised target column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    /// Continuous water level in cm.
    Level,
    /// Binary flood flag (1 above threshold).
    FloodFlag,
}

/// Supervised dataset: named feature columns, a target column, row
/// timestamps, and free-text provenance notes describing how it was built.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroDataset {
    pub feature_names: Vec<String>,
    /// Row-major; every row has `feature_names.len()` entries.
    pub features: Vec<Vec<f64>>,
    pub target: Vec<f64>,
    pub target_kind: TargetKind,
    pub timestamps: Vec<NaiveDateTime>,
    pub provenance: Vec<String>,
}

impl HydroDataset {
    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Structural checks: consistent shapes, finite features, sorted
    /// timestamps, flag targets in {0, 1}.
    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.target.len() || self.features.len() != self.timestamps.len()
        {
            return Err(Error::DimMismatch(format!(
                "{} feature rows, {} targets, {} timestamps",
                self.features.len(),
                self.target.len(),
                self.timestamps.len()
            )));
        }
        for (r, row) in self.features.iter().enumerate() {
            if row.len() != self.feature_names.len() {
                return Err(Error::DimMismatch(format!(
                    "row {r} has {} features, header names {}",
                    row.len(),
                    self.feature_names.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("non-finite feature in row {r}")));
            }
        }
        if self.target_kind == TargetKind::FloodFlag
            && self.target.iter().any(|&t| t != 0.0 && t != 1.0)
        {
            return Err(Error::Config("flood flags must be 0 or 1".into()));
        }
        if self.timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("row timestamps must strictly increase".into()));
        }
        Ok(())
    }
}
