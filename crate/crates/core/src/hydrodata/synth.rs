//! Calibrated synthetic hydrology: daily water level and precipitation
//! streams with a seasonal cycle, persistent noise, and rain-driven
//! spikes, quantile-calibrated so class balance and moments land on the
//! configured targets for any seed.

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{TimeSeriesRecord, Variable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCalib {
    pub days: usize,
    pub start_date: NaiveDate,
    pub station_id: String,
    /// Share of days strictly above the flood threshold.
    pub flood_rate: f64,
    pub level_mean_cm: f64,
    pub level_max_cm: f64,
    pub threshold_cm: f64,
    pub precip_mean_mm: f64,
    pub precip_max_mm: f64,
}

impl Default for SynthCalib {
    fn default() -> Self {
        SynthCalib {
            // 20 years starting on a leap year: 2000-01-01..2019-12-31.
            days: 7305,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            station_id: "synthetic-01".into(),
            flood_rate: 0.0578,
            level_mean_cm: 37.0,
            level_max_cm: 376.0,
            threshold_cm: 90.0,
            precip_mean_mm: 3.10,
            precip_max_mm: 90.8,
        }
    }
}

impl SynthCalib {
    fn validate(&self) -> Result<()> {
        let positive = [
            ("flood_rate", self.flood_rate),
            ("level_mean_cm", self.level_mean_cm),
            ("level_max_cm", self.level_max_cm),
            ("threshold_cm", self.threshold_cm),
            ("precip_mean_mm", self.precip_mean_mm),
            ("precip_max_mm", self.precip_max_mm),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if self.days < 2 {
            return Err(Error::Config(format!("days = {} too short", self.days)));
        }
        if self.flood_rate >= 0.4 {
            return Err(Error::Config(format!(
                "flood_rate {} too high to calibrate (must be < 0.4)",
                self.flood_rate
            )));
        }
        if self.precip_mean_mm >= self.precip_max_mm {
            return Err(Error::Config(format!(
                "precip mean {} must be below max {}",
                self.precip_mean_mm, self.precip_max_mm
            )));
        }
        if !(self.level_mean_cm < self.threshold_cm && self.threshold_cm < self.level_max_cm) {
            return Err(Error::Config(format!(
                "need level mean {} < threshold {} < level max {}",
                self.level_mean_cm, self.threshold_cm, self.level_max_cm
            )));
        }
        // The exact tail pin needs total rainfall mass well above the max.
        if self.days as f64 * self.precip_mean_mm < 2.0 * self.precip_max_mm {
            return Err(Error::Config(
                "horizon too short to calibrate the precipitation tail".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub level: Vec<TimeSeriesRecord>,
    pub precipitation: Vec<TimeSeriesRecord>,
}

fn seasonal_phase(date: NaiveDate) -> f64 {
    // Peaks in mid-January: wetter, higher winters.
    let doy = date.ordinal() as f64;
    (2.0 * std::f64::consts::PI * (doy - 15.0) / 365.25).cos()
}

/// Exact post-hoc calibration of the rain amounts: rescale to the target
/// mean, then pin the single largest value to the target max while
/// rescaling the rest to keep the mean untouched. The per-draw cap keeps
/// every natural value far below the pinned maximum.
fn calibrate_rain(amounts: &mut [f64], mean_target: f64, max_target: f64) -> Result<()> {
    let n = amounts.len() as f64;
    let sum: f64 = amounts.iter().sum();
    if sum <= 0.0 {
        return Err(Error::Config("no wet days generated".into()));
    }
    let scale = mean_target * n / sum;
    for v in amounts.iter_mut() {
        *v *= scale;
    }
    let (max_index, _) = amounts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let total = mean_target * n;
    let rest = total - amounts[max_index];
    if rest <= 0.0 {
        return Err(Error::Config("precipitation mass too small to pin the maximum".into()));
    }
    let adjust = (total - max_target) / rest;
    if adjust <= 0.0 {
        return Err(Error::Config("precipitation mass too small to pin the maximum".into()));
    }
    for (i, v) in amounts.iter_mut().enumerate() {
        if i == max_index {
            *v = max_target;
        } else {
            *v *= adjust;
        }
    }
    Ok(())
}

/// Monotone piecewise-linear map for one calendar-year block of raw
/// values: min→0, median→m, the (1−rate) quantile→threshold, max→M. The
/// median knot m is solved so the block mean lands exactly on target.
struct BlockMap {
    k0: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    m: f64,
    threshold: f64,
    year_max: f64,
}

impl BlockMap {
    fn build(raws: &[f64], rate: f64, mean_target: f64, threshold: f64, year_max: f64) -> BlockMap {
        let n = raws.len();
        let mut sorted: Vec<f64> = raws.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k0 = sorted[0];
        let k3 = sorted[n - 1];
        let count_above = ((rate * n as f64).round() as usize).min(n / 2);
        let k2 = if count_above >= 1 && n >= 4 {
            sorted[n - 1 - count_above]
        } else {
            k3
        };
        let k1 = super::clean::quantile_linear(&sorted, 0.5).min(k2);

        // Mean is affine in the median knot: solve it, then clamp to keep
        // the map monotone.
        let mut sum_u = 0.0;
        let mut sum_one_minus_v = 0.0;
        let mut sum_v = 0.0;
        let mut sum_c = 0.0;
        for &raw in raws {
            if raw <= k1 {
                sum_u += Self::unit(raw, k0, k1);
            } else if raw <= k2 {
                let v = Self::unit(raw, k1, k2);
                sum_v += v;
                sum_one_minus_v += 1.0 - v;
            } else {
                sum_c += threshold + (year_max - threshold) * Self::unit(raw, k2, k3);
            }
        }
        let denominator = sum_u + sum_one_minus_v;
        let m = if denominator > 1e-9 {
            ((mean_target * n as f64 - threshold * sum_v - sum_c) / denominator)
                .clamp(0.02 * threshold, 0.98 * threshold)
        } else {
            0.5 * threshold
        };
        BlockMap {
            k0,
            k1,
            k2,
            k3,
            m,
            threshold,
            year_max,
        }
    }

    fn unit(raw: f64, lo: f64, hi: f64) -> f64 {
        if hi > lo {
            (raw - lo) / (hi - lo)
        } else {
            0.0
        }
    }

    fn level(&self, raw: f64) -> f64 {
        if raw <= self.k1 {
            self.m * Self::unit(raw, self.k0, self.k1)
        } else if raw <= self.k2 {
            self.m + (self.threshold - self.m) * Self::unit(raw, self.k1, self.k2)
        } else {
            self.threshold + (self.year_max - self.threshold) * Self::unit(raw, self.k2, self.k3)
        }
    }
}

/// Deterministic generator: seasonal wet-day rainfall, AR(1) level noise
/// (φ = 0.85) plus a two-day rain response, then per-calendar-year
/// quantile calibration so every year holds the target flood share and
/// mean while the single wettest year carries the maximum.
pub fn synth_generate(seed: u64, calib: &SynthCalib) -> Result<SynthData> {
    calib.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = calib.days;
    let dates: Vec<NaiveDate> = (0..n)
        .map(|i| calib.start_date + chrono::Duration::days(i as i64))
        .collect();

    // Rainfall: seasonal wet probability and exponential wet-day amounts,
    // capped per draw so the calibrated tail pin is always the maximum.
    let mut rain = Vec::with_capacity(n);
    for date in &dates {
        let phase = seasonal_phase(*date);
        let wet_probability = 0.40 + 0.12 * phase;
        let wet = rng.gen::<f64>() < wet_probability;
        if wet {
            let scale = 2.2 + 0.8 * phase;
            let amount: f64 = -scale * (1.0 - rng.gen::<f64>()).ln();
            rain.push(amount.min(6.0 * scale));
        } else {
            rain.push(0.0);
        }
    }
    calibrate_rain(&mut rain, calib.precip_mean_mm, calib.precip_max_mm)?;

    // Raw level shape before calibration.
    let phi: f64 = 0.85;
    let innovation = Normal::new(0.0, 6.0).unwrap();
    let mut noise = innovation.sample(&mut rng) / (1.0 - phi * phi).sqrt();
    let mut raw = Vec::with_capacity(n);
    for (i, date) in dates.iter().enumerate() {
        if i > 0 {
            noise = phi * noise + innovation.sample(&mut rng);
        }
        let seasonal = 12.0 * seasonal_phase(*date);
        let response = 1.2 * rain[i] + if i > 0 { 0.8 * rain[i - 1] } else { 0.0 };
        raw.push(seasonal + noise + response);
    }

    // Calendar-year blocks, each with its own monotone map. The block
    // holding the global raw maximum maps to the configured level max;
    // other years get a jittered lower annual maximum.
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || dates[i].year() != dates[start].year() {
            blocks.push((start, i));
            start = i;
        }
    }
    let global_max_index = raw
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let mut level = vec![0.0; n];
    for &(lo, hi) in &blocks {
        let jitter: f64 = rng.gen::<f64>();
        let year_max = if (lo..hi).contains(&global_max_index) {
            calib.level_max_cm
        } else {
            calib.threshold_cm + (calib.level_max_cm - calib.threshold_cm) * (0.55 + 0.35 * jitter)
        };
        let map = BlockMap::build(
            &raw[lo..hi],
            calib.flood_rate,
            calib.level_mean_cm,
            calib.threshold_cm,
            year_max,
        );
        for i in lo..hi {
            level[i] = map.level(raw[i]);
        }
    }

    let record = |date: &NaiveDate, variable: Variable, value: f64| TimeSeriesRecord {
        timestamp: date.and_hms_opt(0, 0, 0).unwrap(),
        station_id: calib.station_id.clone(),
        variable,
        value: Some(value),
    };
    Ok(SynthData {
        level: dates
            .iter()
            .zip(&level)
            .map(|(d, &v)| record(d, Variable::WaterLevelCm, v))
            .collect(),
        precipitation: dates
            .iter()
            .zip(&rain)
            .map(|(d, &v)| record(d, Variable::PrecipitationMm, v))
            .collect(),
    })
}
