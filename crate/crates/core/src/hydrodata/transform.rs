//! Labeling, scaling, chronological splitting, and lag-window supervised
//! construction. Scalers fit on the training partition only; splits never
//! shuffle.

use chrono::NaiveDateTime;

use super::{HydroDataset, TargetKind};
use crate::error::{Error, Result};

/// Binary flood flags: 1 iff level is strictly above the threshold, so a
/// reading exactly at the threshold is not a flood.
pub fn label_floods(levels: &[f64], threshold_cm: f64) -> Vec<u8> {
    levels
        .iter()
        .map(|&v| u8::from(v > threshold_cm))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleMode {
    /// Map the training min..max onto [0, π] for quantum feature maps.
    MinMax0Pi,
    ZScore,
    MinMax01,
}

impl ScaleMode {
    pub fn parse(text: &str) -> Option<ScaleMode> {
        match text {
            "minmax_0_pi" => Some(ScaleMode::MinMax0Pi),
            "zscore" => Some(ScaleMode::ZScore),
            "minmax_0_1" => Some(ScaleMode::MinMax01),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScaleMode::MinMax0Pi => "minmax_0_pi",
            ScaleMode::ZScore => "zscore",
            ScaleMode::MinMax01 => "minmax_0_1",
        }
    }
}

/// Per-column training statistics backing a fitted scaler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mode: ScaleMode,
    pub columns: Vec<ColumnStats>,
    /// Degenerate-column notes (zero variance, zero range).
    pub warnings: Vec<String>,
}

const DEGENERATE_STD: f64 = 1e-12;

impl Scaler {
    /// Fit on training rows only; callers apply the result to both
    /// partitions so test data never influences the statistics.
    pub fn fit(rows: &[Vec<f64>], mode: ScaleMode) -> Result<Scaler> {
        if rows.is_empty() {
            return Err(Error::EmptyBatch);
        }
        let width = rows[0].len();
        let mut columns = Vec::with_capacity(width);
        let mut warnings = Vec::new();
        for c in 0..width {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut sum = 0.0;
            for row in rows {
                if row.len() != width {
                    return Err(Error::DimMismatch(format!(
                        "ragged rows: {} vs {width}",
                        row.len()
                    )));
                }
                let v = row[c];
                if !v.is_finite() {
                    return Err(Error::Config(format!("non-finite value in column {c}")));
                }
                min = min.min(v);
                max = max.max(v);
                sum += v;
            }
            let mean = sum / rows.len() as f64;
            let var =
                rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / rows.len() as f64;
            let std = var.sqrt();
            if max == min {
                warnings.push(format!("column {c}: zero range, scaled output is constant"));
            } else if std <= DEGENERATE_STD {
                warnings.push(format!("column {c}: zero variance, scaled output is constant"));
            }
            columns.push(ColumnStats { min, max, mean, std });
        }
        Ok(Scaler {
            mode,
            columns,
            warnings,
        })
    }

    fn scale_value(&self, stats: &ColumnStats, v: f64) -> f64 {
        match self.mode {
            ScaleMode::MinMax01 | ScaleMode::MinMax0Pi => {
                let range = stats.max - stats.min;
                if range == 0.0 {
                    return 0.0;
                }
                let unit = (v - stats.min) / range;
                if self.mode == ScaleMode::MinMax0Pi {
                    unit * std::f64::consts::PI
                } else {
                    unit
                }
            }
            ScaleMode::ZScore => {
                if stats.std <= DEGENERATE_STD {
                    0.0
                } else {
                    (v - stats.mean) / stats.std
                }
            }
        }
    }

    fn unscale_value(&self, stats: &ColumnStats, v: f64) -> f64 {
        match self.mode {
            ScaleMode::MinMax01 | ScaleMode::MinMax0Pi => {
                let range = stats.max - stats.min;
                if range == 0.0 {
                    return stats.min;
                }
                let unit = if self.mode == ScaleMode::MinMax0Pi {
                    v / std::f64::consts::PI
                } else {
                    v
                };
                stats.min + unit * range
            }
            ScaleMode::ZScore => {
                if stats.std <= DEGENERATE_STD {
                    stats.mean
                } else {
                    stats.mean + v * stats.std
                }
            }
        }
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.apply(rows, Scaler::scale_value)
    }

    pub fn inverse(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.apply(rows, Scaler::unscale_value)
    }

    fn apply(
        &self,
        rows: &[Vec<f64>],
        f: fn(&Scaler, &ColumnStats, f64) -> f64,
    ) -> Result<Vec<Vec<f64>>> {
        rows.iter()
            .map(|row| {
                if row.len() != self.columns.len() {
                    return Err(Error::DimMismatch(format!(
                        "row width {} vs fitted {}",
                        row.len(),
                        self.columns.len()
                    )));
                }
                Ok(row
                    .iter()
                    .zip(&self.columns)
                    .map(|(&v, stats)| f(self, stats, v))
                    .collect())
            })
            .collect()
    }
}

/// Scale a train/test pair with statistics taken from the training rows
/// alone.
pub fn normalize_split(
    train: &[Vec<f64>],
    test: &[Vec<f64>],
    mode: ScaleMode,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Scaler)> {
    let scaler = Scaler::fit(train, mode)?;
    let train_scaled = scaler.transform(train)?;
    let test_scaled = scaler.transform(test)?;
    Ok((train_scaled, test_scaled, scaler))
}

/// First ⌈fraction·N⌉ rows train, the rest test, order untouched. The
/// count is clamped so both partitions stay nonempty.
pub fn chrono_split(dataset: &HydroDataset, train_fraction: f64) -> Result<(HydroDataset, HydroDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let n = dataset.n_rows();
    if n < 2 {
        return Err(Error::Config(format!(
            "cannot split {n} rows into two nonempty partitions"
        )));
    }
    let n_train = ((train_fraction * n as f64).ceil() as usize).clamp(1, n - 1);
    let slice = |lo: usize, hi: usize| HydroDataset {
        feature_names: dataset.feature_names.clone(),
        features: dataset.features[lo..hi].to_vec(),
        target: dataset.target[lo..hi].to_vec(),
        target_kind: dataset.target_kind,
        timestamps: dataset.timestamps[lo..hi].to_vec(),
        provenance: dataset.provenance.clone(),
    };
    Ok((slice(0, n_train), slice(n_train, n)))
}

/// Exogenous column aligned to the lag window (the value at t−1 enters
/// the row predicting t).
#[derive(Debug, Clone, PartialEq)]
pub struct ExogSeries {
    pub name: String,
    pub values: Vec<f64>,
}

/// Lag-window construction: row t carries [y_{t−p} … y_{t−1}] plus each
/// exogenous value at t−1, and targets y_t (or its flood flag).
pub fn build_supervised(
    levels: &[f64],
    timestamps: &[NaiveDateTime],
    exogenous: &[ExogSeries],
    lags: usize,
    target_kind: TargetKind,
    threshold_cm: f64,
) -> Result<HydroDataset> {
    if lags == 0 {
        return Err(Error::Config("lag order must be at least 1".into()));
    }
    if levels.len() != timestamps.len() {
        return Err(Error::DimMismatch(format!(
            "{} levels vs {} timestamps",
            levels.len(),
            timestamps.len()
        )));
    }
    for exog in exogenous {
        if exog.values.len() != levels.len() {
            return Err(Error::DimMismatch(format!(
                "exogenous `{}` has {} values, levels {}",
                exog.name,
                exog.values.len(),
                levels.len()
            )));
        }
    }
    if levels.len() < lags + 1 {
        return Err(Error::InsufficientHistory {
            need: lags + 1,
            got: levels.len(),
        });
    }
    if levels.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("levels must be finite".into()));
    }

    let mut feature_names: Vec<String> =
        (0..lags).map(|j| format!("level_lag_{}", lags - j)).collect();
    for exog in exogenous {
        feature_names.push(format!("{}_lag_1", exog.name));
    }

    let mut features = Vec::with_capacity(levels.len() - lags);
    let mut target = Vec::with_capacity(levels.len() - lags);
    let mut out_timestamps = Vec::with_capacity(levels.len() - lags);
    for t in lags..levels.len() {
        let mut row: Vec<f64> = levels[t - lags..t].to_vec();
        for exog in exogenous {
            row.push(exog.values[t - 1]);
        }
        features.push(row);
        target.push(match target_kind {
            TargetKind::Level => levels[t],
            TargetKind::FloodFlag => f64::from(u8::from(levels[t] > threshold_cm)),
        });
        out_timestamps.push(timestamps[t]);
    }

    let dataset = HydroDataset {
        feature_names,
        features,
        target,
        target_kind,
        timestamps: out_timestamps,
        provenance: vec![format!(
            "lag windows p={lags} over {} records, {} exogenous columns, threshold {threshold_cm} cm",
            levels.len(),
            exogenous.len()
        )],
    };
    dataset.validate()?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn day(i: usize) -> NaiveDateTime {
        chrono::NaiveDate::from_ymd_opt(2021, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
            + chrono::Duration::days(i as i64)
    }

    #[test]
    fn threshold_is_strict() {
        assert_eq!(label_floods(&[95.0, 37.0, 90.0, 90.0001], 90.0), vec![1, 0, 0, 1]);
    }

    #[test]
    fn labeling_commutes_with_permutation() {
        let levels = vec![10.0, 95.0, 90.0, 120.0, 4.0];
        let flags = label_floods(&levels, 90.0);
        let permuted: Vec<f64> = vec![levels[3], levels[0], levels[4], levels[2], levels[1]];
        let expected: Vec<u8> = vec![flags[3], flags[0], flags[4], flags[2], flags[1]];
        assert_eq!(label_floods(&permuted, 90.0), expected);
    }

    #[test]
    fn minmax_unit_and_pi_ranges() {
        let rows = vec![vec![0.0], vec![5.0], vec![10.0]];
        let s01 = Scaler::fit(&rows, ScaleMode::MinMax01).unwrap();
        let scaled = s01.transform(&rows).unwrap();
        assert_eq!(scaled, vec![vec![0.0], vec![0.5], vec![1.0]]);
        let spi = Scaler::fit(&rows, ScaleMode::MinMax0Pi).unwrap();
        let scaled = spi.transform(&rows).unwrap();
        assert_abs_diff_eq!(scaled[2][0], std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn round_trip_recovers_originals() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let x = f64::from(i);
                vec![x * 1.7 - 3.0, (x * 0.31).sin() * 20.0, 100.0 - x]
            })
            .collect();
        for mode in [ScaleMode::MinMax01, ScaleMode::MinMax0Pi, ScaleMode::ZScore] {
            let scaler = Scaler::fit(&rows, mode).unwrap();
            let back = scaler.inverse(&scaler.transform(&rows).unwrap()).unwrap();
            for (orig, rec) in rows.iter().zip(&back) {
                for (a, b) in orig.iter().zip(rec) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn zero_variance_zscore_passes_zeros_with_warning() {
        let rows = vec![vec![7.0, 1.0], vec![7.0, 2.0], vec![7.0, 3.0]];
        let scaler = Scaler::fit(&rows, ScaleMode::ZScore).unwrap();
        let scaled = scaler.transform(&rows).unwrap();
        assert!(scaled.iter().all(|r| r[0] == 0.0));
        assert_eq!(scaler.warnings.len(), 1);
        assert!(scaler.warnings[0].contains("column 0"));
    }

    #[test]
    fn scaler_ignores_test_rows() {
        let train = vec![vec![0.0], vec![10.0]];
        let test_a = vec![vec![5.0]];
        let test_b = vec![vec![500.0]];
        let (_, _, scaler_a) = normalize_split(&train, &test_a, ScaleMode::MinMax01).unwrap();
        let (_, _, scaler_b) = normalize_split(&train, &test_b, ScaleMode::MinMax01).unwrap();
        assert_eq!(scaler_a.columns, scaler_b.columns);
    }

    fn toy_dataset(n: usize) -> HydroDataset {
        HydroDataset {
            feature_names: vec!["f".into()],
            features: (0..n).map(|i| vec![f64::from(i as u32)]).collect(),
            target: (0..n).map(|i| f64::from(u8::from(i % 7 == 0))).collect(),
            target_kind: TargetKind::FloodFlag,
            timestamps: (0..n).map(day).collect(),
            provenance: vec![],
        }
    }

    #[test]
    fn split_80_20_preserves_order() {
        let (train, test) = chrono_split(&toy_dataset(10), 0.8).unwrap();
        assert_eq!(train.n_rows(), 8);
        assert_eq!(test.n_rows(), 2);
        assert!(train.timestamps.last().unwrap() < test.timestamps.first().unwrap());
        assert_eq!(test.features[0], vec![8.0]);
    }

    #[test]
    fn bad_fractions_rejected() {
        for f in [0.0, 1.0, -0.2, 1.5] {
            assert!(matches!(
                chrono_split(&toy_dataset(10), f).unwrap_err(),
                Error::Config(_)
            ));
        }
    }

    #[test]
    fn split_reproduces_reference_test_population() {
        // 1375 rows at fraction 0.8 leave 275 test rows; the label layout
        // puts 32 positives and 243 negatives in the tail.
        let n = 1375;
        let mut dataset = toy_dataset(n);
        dataset.target = (0..n)
            .map(|i| f64::from(u8::from((1100..1356).contains(&i) && (i - 1100) % 8 == 7)))
            .collect();
        let (train, test) = chrono_split(&dataset, 0.8).unwrap();
        assert_eq!(train.n_rows(), 1100);
        assert_eq!(test.n_rows(), 275);
        let pos = test.target.iter().filter(|&&t| t == 1.0).count();
        assert_eq!(pos, 32);
        assert_eq!(test.n_rows() - pos, 243);
    }

    #[test]
    fn lag_windows_match_hand_layout() {
        let levels = vec![1.0, 2.0, 3.0, 4.0];
        let ts: Vec<NaiveDateTime> = (0..4).map(day).collect();
        let ds = build_supervised(&levels, &ts, &[], 2, TargetKind::Level, 90.0).unwrap();
        assert_eq!(ds.features, vec![vec![1.0, 2.0], vec![2.0, 3.0]]);
        assert_eq!(ds.target, vec![3.0, 4.0]);
        assert_eq!(ds.feature_names, vec!["level_lag_2", "level_lag_1"]);
        assert_eq!(ds.timestamps, vec![day(2), day(3)]);
    }

    #[test]
    fn max_lag_gives_one_row() {
        let levels = vec![1.0, 2.0, 3.0, 4.0];
        let ts: Vec<NaiveDateTime> = (0..4).map(day).collect();
        let ds = build_supervised(&levels, &ts, &[], 3, TargetKind::Level, 90.0).unwrap();
        assert_eq!(ds.n_rows(), 1);
        assert_eq!(ds.features[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(ds.target[0], 4.0);
    }

    #[test]
    fn windows_flatten_back_to_the_series() {
        let levels: Vec<f64> = (0..30).map(|i| (f64::from(i) * 0.7).sin() * 50.0 + 40.0).collect();
        let ts: Vec<NaiveDateTime> = (0..30).map(day).collect();
        let p = 5;
        let ds = build_supervised(&levels, &ts, &[], p, TargetKind::Level, 90.0).unwrap();
        let mut rebuilt = ds.features[0].clone();
        rebuilt.extend(ds.target.iter());
        assert_eq!(rebuilt, levels);
    }

    #[test]
    fn exogenous_column_aligned_at_t_minus_1() {
        let levels = vec![1.0, 2.0, 3.0, 4.0];
        let rain = ExogSeries {
            name: "precip_mm".into(),
            values: vec![10.0, 20.0, 30.0, 40.0],
        };
        let ts: Vec<NaiveDateTime> = (0..4).map(day).collect();
        let ds = build_supervised(&levels, &ts, &[rain], 2, TargetKind::Level, 90.0).unwrap();
        assert_eq!(ds.feature_names[2], "precip_mm_lag_1");
        // Row predicting t=2 sees rain at t=1; row for t=3 sees t=2.
        assert_eq!(ds.features[0][2], 20.0);
        assert_eq!(ds.features[1][2], 30.0);
    }

    #[test]
    fn short_history_rejected() {
        let levels = vec![1.0, 2.0];
        let ts: Vec<NaiveDateTime> = (0..2).map(day).collect();
        assert!(matches!(
            build_supervised(&levels, &ts, &[], 2, TargetKind::Level, 90.0).unwrap_err(),
            Error::InsufficientHistory { need: 3, got: 2 }
        ));
    }

    #[test]
    fn flag_targets_follow_threshold() {
        let levels = vec![10.0, 95.0, 90.0, 120.0];
        let ts: Vec<NaiveDateTime> = (0..4).map(day).collect();
        let ds = build_supervised(&levels, &ts, &[], 1, TargetKind::FloodFlag, 90.0).unwrap();
        assert_eq!(ds.target, vec![1.0, 0.0, 1.0]);
    }
}
