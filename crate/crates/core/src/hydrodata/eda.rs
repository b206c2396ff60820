//! Summary statistics over cleaned streams: class balance against the
//! flood threshold, per-variable moments, outlier counts, and seasonal
//! (calendar-month) means.

use chrono::Datelike;

use super::clean::CleanedSeries;
use super::transform::label_floods;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VariableStats {
    pub name: String,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdaReport {
    pub threshold_cm: f64,
    pub flood_count: usize,
    pub non_flood_count: usize,
    pub flood_pct: f64,
    pub non_flood_pct: f64,
    pub variables: Vec<VariableStats>,
    /// Total records flagged by the 1.5×IQR rule across input streams.
    pub outlier_count: usize,
    /// (calendar month 1-12, mean level) for months present in the data.
    pub seasonal_level_means: Vec<(u32, f64)>,
}

/// Class shares in percent; together they always total 100.
pub fn class_shares(flood_count: usize, non_flood_count: usize) -> (f64, f64) {
    let total = (flood_count + non_flood_count) as f64;
    if total == 0.0 {
        return (0.0, 100.0);
    }
    let flood = flood_count as f64 / total * 100.0;
    (flood, 100.0 - flood)
}

fn stats_of(name: &str, values: &[f64]) -> VariableStats {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    VariableStats {
        name: name.to_string(),
        count: values.len(),
        mean: sum / values.len() as f64,
        min,
        max,
    }
}

/// Report over a cleaned level stream plus optional precipitation.
/// Seasonal means appear whenever more than one record exists; with at
/// least a year of data all 12 months are covered.
pub fn eda_report(
    level: &CleanedSeries,
    precipitation: Option<&CleanedSeries>,
    threshold_cm: f64,
) -> Result<EdaReport> {
    if level.records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let values = level.values();
    let flags = label_floods(&values, threshold_cm);
    let flood_count = flags.iter().filter(|&&f| f == 1).count();
    let non_flood_count = values.len() - flood_count;
    let (flood_pct, non_flood_pct) = class_shares(flood_count, non_flood_count);

    let mut variables = vec![stats_of("water_level_cm", &values)];
    let mut outlier_count = level.log.outlier_count;
    if let Some(precip) = precipitation {
        variables.push(stats_of("precipitation_mm", &precip.values()));
        outlier_count += precip.log.outlier_count;
    }

    let mut seasonal_level_means = Vec::new();
    if level.records.len() > 1 {
        let mut sums = [0.0f64; 12];
        let mut counts = [0usize; 12];
        for r in &level.records {
            let m = r.timestamp.month() as usize - 1;
            sums[m] += r.value.unwrap_or(0.0);
            counts[m] += 1;
        }
        for m in 0..12 {
            if counts[m] > 0 {
                seasonal_level_means.push((m as u32 + 1, sums[m] / counts[m] as f64));
            }
        }
    }

    Ok(EdaReport {
        threshold_cm,
        flood_count,
        non_flood_count,
        flood_pct,
        non_flood_pct,
        variables,
        outlier_count,
        seasonal_level_means,
    })
}

impl EdaReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("exploratory summary\n");
        out.push_str(&format!("flood threshold: {} cm (strictly above)\n", self.threshold_cm));
        out.push_str(&format!(
            "events: {} flood / {} non-flood ({:.2}% / {:.2}%)\n",
            self.flood_count, self.non_flood_count, self.flood_pct, self.non_flood_pct
        ));
        out.push_str(&format!("outliers flagged (1.5 x IQR): {}\n", self.outlier_count));
        for v in &self.variables {
            out.push_str(&format!(
                "{}: n={} mean={:.2} min={:.2} max={:.2}\n",
                v.name, v.count, v.mean, v.min, v.max
            ));
        }
        if !self.seasonal_level_means.is_empty() {
            out.push_str("monthly mean water level (cm):\n");
            for (month, mean) in &self.seasonal_level_means {
                out.push_str(&format!("  month {month:02}: {mean:.2}\n"));
            }
        }
        out
    }

    /// Machine-readable blocks: a metrics block, a variables block, and a
    /// seasonal block, each with its own header row.
    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("metric,value\n");
        out.push_str(&format!("threshold_cm,{}\n", self.threshold_cm));
        out.push_str(&format!("flood_count,{}\n", self.flood_count));
        out.push_str(&format!("non_flood_count,{}\n", self.non_flood_count));
        out.push_str(&format!("flood_pct,{:.6}\n", self.flood_pct));
        out.push_str(&format!("non_flood_pct,{:.6}\n", self.non_flood_pct));
        out.push_str(&format!("outlier_count,{}\n", self.outlier_count));
        out.push_str("\nvariable,count,mean,min,max\n");
        for v in &self.variables {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6}\n",
                v.name, v.count, v.mean, v.min, v.max
            ));
        }
        if !self.seasonal_level_means.is_empty() {
            out.push_str("\nmonth,mean_level_cm\n");
            for (month, mean) in &self.seasonal_level_means {
                out.push_str(&format!("{month},{mean:.6}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrodata::clean::{clean_series, CleanRules};
    use crate::hydrodata::{TimeSeriesRecord, Variable};

    fn stream(values: &[f64], step_days: i64) -> CleanedSeries {
        let records: Vec<TimeSeriesRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| TimeSeriesRecord {
                timestamp: chrono::NaiveDate::from_ymd_opt(2020, 1, 1)
                    .unwrap()
                    .and_hms_opt(0, 0, 0)
                    .unwrap()
                    + chrono::Duration::days(i as i64 * step_days),
                station_id: "s1".into(),
                variable: Variable::WaterLevelCm,
                value: Some(v),
            })
            .collect();
        clean_series(&records, &CleanRules::default()).unwrap()
    }

    #[test]
    fn reference_counts_give_expected_shares() {
        let (flood, non_flood) = class_shares(71_239, 1_160_471);
        assert!((flood - 5.78).abs() < 0.01);
        assert!((non_flood - 94.22).abs() < 0.01);
        assert!((flood + non_flood - 100.0).abs() < 1e-9);
    }

    #[test]
    fn percentages_always_sum_to_100() {
        for (a, b) in [(0, 10), (3, 7), (10, 0), (123, 4567)] {
            let (f, n) = class_shares(a, b);
            assert!((f + n - 100.0).abs() < 0.01);
        }
    }

    #[test]
    fn single_row_report_has_no_seasonal_breakdown() {
        let report = eda_report(&stream(&[42.0], 1), None, 90.0).unwrap();
        assert_eq!(report.variables[0].count, 1);
        assert!(report.seasonal_level_means.is_empty());
        assert_eq!(report.non_flood_count, 1);
    }

    #[test]
    fn full_year_covers_twelve_months() {
        let values: Vec<f64> = (0..366).map(|i| 30.0 + f64::from(i % 40)).collect();
        let report = eda_report(&stream(&values, 1), None, 90.0).unwrap();
        assert_eq!(report.seasonal_level_means.len(), 12);
    }

    #[test]
    fn flood_shares_follow_threshold() {
        let values = vec![80.0, 95.0, 100.0, 50.0, 90.0];
        let report = eda_report(&stream(&values, 1), None, 90.0).unwrap();
        assert_eq!(report.flood_count, 2);
        assert_eq!(report.non_flood_count, 3);
        assert!((report.flood_pct - 40.0).abs() < 1e-9);
    }

    #[test]
    fn renders_include_key_numbers() {
        let report = eda_report(&stream(&[80.0, 95.0], 1), None, 90.0).unwrap();
        let text = report.render_text();
        assert!(text.contains("90 cm"));
        assert!(text.contains("1 flood / 1 non-flood"));
        let csv = report.render_csv();
        assert!(csv.contains("flood_count,1"));
        assert!(csv.contains("water_level_cm,2,"));
    }
}
