//! Run configuration: a versioned JSON file merged with command-line
//! overrides. Referenced data files must exist before any work starts.

use std::path::{Path, PathBuf};

use hydroq_core::bench::report::{ModelKind, ModelSpec};
use hydroq_core::hydrodata::synth::SynthCalib;
use hydroq_core::{Error, Result};
use serde::Deserialize;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub level_path: PathBuf,
    #[serde(default)]
    pub precipitation_path: Option<PathBuf>,
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    #[serde(default)]
    pub decimal_comma: bool,
    #[serde(default)]
    pub day_first_dates: bool,
    #[serde(default = "default_timestamp_col")]
    pub timestamp_col: String,
    #[serde(default = "default_value_col")]
    pub value_col: String,
    #[serde(default)]
    pub station_col: Option<String>,
    #[serde(default)]
    pub variable_col: Option<String>,
    #[serde(default = "default_station")]
    pub default_station: String,
}

fn default_delimiter() -> String {
    ",".into()
}

fn default_timestamp_col() -> String {
    "timestamp".into()
}

fn default_value_col() -> String {
    "value".into()
}

fn default_station() -> String {
    "gauge-01".into()
}

/// Synthetic-data calibration targets. Defaults reproduce the reference
/// gauge statistics; the flood threshold follows the run-level setting.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    #[serde(default = "default_days")]
    pub days: usize,
    #[serde(default = "default_start_year")]
    pub start_year: i32,
    #[serde(default = "default_station")]
    pub station_id: String,
    #[serde(default = "default_flood_rate")]
    pub flood_rate: f64,
    #[serde(default = "default_level_mean")]
    pub level_mean_cm: f64,
    #[serde(default = "default_level_max")]
    pub level_max_cm: f64,
    #[serde(default = "default_precip_mean")]
    pub precip_mean_mm: f64,
    #[serde(default = "default_precip_max")]
    pub precip_max_mm: f64,
}

fn default_days() -> usize {
    7305
}

fn default_start_year() -> i32 {
    2000
}

fn default_flood_rate() -> f64 {
    0.0578
}

fn default_level_mean() -> f64 {
    37.0
}

fn default_level_max() -> f64 {
    376.0
}

fn default_precip_mean() -> f64 {
    3.10
}

fn default_precip_max() -> f64 {
    90.8
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            days: default_days(),
            start_year: default_start_year(),
            station_id: default_station(),
            flood_rate: default_flood_rate(),
            level_mean_cm: default_level_mean(),
            level_max_cm: default_level_max(),
            precip_mean_mm: default_precip_mean(),
            precip_max_mm: default_precip_max(),
        }
    }
}

impl SynthConfig {
    pub fn to_calib(&self, threshold_cm: f64) -> Result<SynthCalib> {
        let start_date = chrono::NaiveDate::from_ymd_opt(self.start_year, 1, 1)
            .ok_or_else(|| Error::Config(format!("invalid start year {}", self.start_year)))?;
        Ok(SynthCalib {
            days: self.days,
            start_date,
            station_id: self.station_id.clone(),
            flood_rate: self.flood_rate,
            level_mean_cm: self.level_mean_cm,
            level_max_cm: self.level_max_cm,
            threshold_cm,
            precip_mean_mm: self.precip_mean_mm,
            precip_max_mm: self.precip_max_mm,
        })
    }
}

/// Hyperparameters of the variational forecaster.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastParams {
    #[serde(default = "default_fc_depth")]
    pub depth: usize,
    #[serde(default = "default_fc_reps")]
    pub reps: usize,
    #[serde(default = "default_fc_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_fc_iters")]
    pub iters: usize,
}

fn default_fc_depth() -> usize {
    2
}

fn default_fc_reps() -> usize {
    1
}

fn default_fc_learning_rate() -> f64 {
    0.1
}

fn default_fc_iters() -> usize {
    60
}

impl Default for ForecastParams {
    fn default() -> Self {
        ForecastParams {
            depth: default_fc_depth(),
            reps: default_fc_reps(),
            learning_rate: default_fc_learning_rate(),
            iters: default_fc_iters(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModelKindConfig {
    Majority,
    AlwaysPositive,
    Knn { k: usize },
    Tree { max_depth: usize, min_leaf: usize },
    Forest { n_trees: usize, max_depth: usize, min_leaf: usize },
    AdaBoost { rounds: usize },
    Gbrt { rounds: usize, shrinkage: f64 },
    SvmRbf {
        c: f64,
        #[serde(default)]
        gamma: Option<f64>,
    },
    SvmLinear { c: f64 },
    Qsvm { c: f64, reps: usize },
    Vqc { depth: usize, reps: usize, learning_rate: f64, iters: usize },
    Qboost {
        pool: usize,
        lambda_factor: f64,
        #[serde(default)]
        plus: bool,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct ModelConfig {
    pub name: String,
    #[serde(default)]
    pub max_rows: Option<usize>,
    #[serde(flatten)]
    pub kind: ModelKindConfig,
}

impl ModelConfig {
    pub fn to_spec(&self) -> ModelSpec {
        let kind = match &self.kind {
            ModelKindConfig::Majority => ModelKind::Majority,
            ModelKindConfig::AlwaysPositive => ModelKind::AlwaysPositive,
            ModelKindConfig::Knn { k } => ModelKind::Knn { k: *k },
            ModelKindConfig::Tree { max_depth, min_leaf } => ModelKind::Tree {
                max_depth: *max_depth,
                min_leaf: *min_leaf,
            },
            ModelKindConfig::Forest { n_trees, max_depth, min_leaf } => ModelKind::Forest {
                n_trees: *n_trees,
                max_depth: *max_depth,
                min_leaf: *min_leaf,
            },
            ModelKindConfig::AdaBoost { rounds } => ModelKind::AdaBoost { rounds: *rounds },
            ModelKindConfig::Gbrt { rounds, shrinkage } => ModelKind::Gbrt {
                rounds: *rounds,
                shrinkage: *shrinkage,
            },
            ModelKindConfig::SvmRbf { c, gamma } => ModelKind::SvmRbf {
                c: *c,
                gamma: *gamma,
            },
            ModelKindConfig::SvmLinear { c } => ModelKind::SvmLinear { c: *c },
            ModelKindConfig::Qsvm { c, reps } => ModelKind::Qsvm { c: *c, reps: *reps },
            ModelKindConfig::Vqc { depth, reps, learning_rate, iters } => ModelKind::Vqc {
                depth: *depth,
                reps: *reps,
                learning_rate: *learning_rate,
                iters: *iters,
            },
            ModelKindConfig::Qboost { pool, lambda_factor, plus } => ModelKind::Qboost {
                pool: *pool,
                lambda_factor: *lambda_factor,
                plus: *plus,
            },
        };
        ModelSpec {
            name: self.name.clone(),
            kind,
            max_rows: self.max_rows,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub version: u32,
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub threshold_cm: f64,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_lags")]
    pub lags: usize,
    #[serde(default)]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub models: Option<Vec<ModelConfig>>,
    #[serde(default)]
    pub forecast: ForecastParams,
}

fn default_threshold() -> f64 {
    90.0
}

fn default_train_fraction() -> f64 {
    0.8
}

fn default_lags() -> usize {
    5
}

impl Default for FileConfig {
    fn default() -> Self {
        FileConfig {
            version: CONFIG_VERSION,
            seed: 42,
            out_dir: None,
            threshold_cm: default_threshold(),
            train_fraction: default_train_fraction(),
            lags: default_lags(),
            data: None,
            synth: SynthConfig::default(),
            models: None,
            forecast: ForecastParams::default(),
        }
    }
}

/// The model comparison run when the config lists none: the classical
/// baselines at full data and the simulated quantum models on recent-row
/// subsamples sized for statevector simulation.
pub fn default_model_suite() -> Vec<ModelSpec> {
    let spec = |name: &str, kind: ModelKind, max_rows: Option<usize>| ModelSpec {
        name: name.into(),
        kind,
        max_rows,
    };
    vec![
        spec("majority", ModelKind::Majority, None),
        spec("always_flood", ModelKind::AlwaysPositive, None),
        spec("knn_k5", ModelKind::Knn { k: 5 }, None),
        spec("tree", ModelKind::Tree { max_depth: 6, min_leaf: 2 }, None),
        spec(
            "forest",
            ModelKind::Forest { n_trees: 50, max_depth: 8, min_leaf: 2 },
            None,
        ),
        spec("adaboost", ModelKind::AdaBoost { rounds: 50 }, None),
        spec("gbrt", ModelKind::Gbrt { rounds: 50, shrinkage: 0.1 }, None),
        spec("svm_linear", ModelKind::SvmLinear { c: 1.0 }, Some(1500)),
        spec("svm_rbf", ModelKind::SvmRbf { c: 10.0, gamma: None }, Some(1500)),
        spec("qsvm", ModelKind::Qsvm { c: 10.0, reps: 2 }, Some(120)),
        spec(
            "vqc",
            ModelKind::Vqc { depth: 2, reps: 1, learning_rate: 0.15, iters: 60 },
            Some(100),
        ),
        spec(
            "qboost",
            ModelKind::Qboost { pool: 20, lambda_factor: 0.01, plus: false },
            Some(500),
        ),
        spec(
            "qboost_plus",
            ModelKind::Qboost { pool: 20, lambda_factor: 0.01, plus: true },
            Some(500),
        ),
    ]
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threshold_cm: f64,
    pub train_fraction: f64,
    pub lags: usize,
    pub data: Option<DataConfig>,
    pub synth: SynthConfig,
    pub models: Vec<ModelSpec>,
    pub forecast: ForecastParams,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threshold_cm: Option<f64>,
    pub train_fraction: Option<f64>,
    pub lags: Option<usize>,
}

pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
    let file: FileConfig = match path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    if file.version != CONFIG_VERSION {
        return Err(Error::Config(format!(
            "config version {} unsupported; this build reads version {CONFIG_VERSION}",
            file.version
        )));
    }

    // Output directory precedence: flag, then environment, then file,
    // then a local default.
    let out_dir = overrides
        .out
        .clone()
        .or_else(|| std::env::var_os("HYDROQ_OUT").map(PathBuf::from))
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from("hydroq-out"));

    let config = RunConfig {
        seed: overrides.seed.unwrap_or(file.seed),
        out_dir,
        threshold_cm: overrides.threshold_cm.unwrap_or(file.threshold_cm),
        train_fraction: overrides.train_fraction.unwrap_or(file.train_fraction),
        lags: overrides.lags.unwrap_or(file.lags),
        data: file.data,
        synth: file.synth,
        models: file
            .models
            .map_or_else(default_model_suite, |models| {
                models.iter().map(ModelConfig::to_spec).collect()
            }),
        forecast: file.forecast,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    if !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction {} outside (0, 1)",
            config.train_fraction
        )));
    }
    if config.lags == 0 {
        return Err(Error::Config("lag count must be at least 1".into()));
    }
    if !(config.threshold_cm > 0.0 && config.threshold_cm.is_finite()) {
        return Err(Error::Config(format!(
            "flood threshold {} must be positive",
            config.threshold_cm
        )));
    }
    let mut names = std::collections::BTreeSet::new();
    for model in &config.models {
        if !names.insert(model.name.as_str()) {
            return Err(Error::Config(format!(
                "model name `{}` appears twice",
                model.name
            )));
        }
    }
    if let Some(data) = &config.data {
        if data.delimiter.len() != 1 || !data.delimiter.is_ascii() {
            return Err(Error::Config(format!(
                "delimiter `{}` must be one ascii character",
                data.delimiter
            )));
        }
        for path in std::iter::once(&data.level_path).chain(data.precipitation_path.iter()) {
            if !path.exists() {
                return Err(Error::Config(format!(
                    "data file does not exist: {}",
                    path.display()
                )));
            }
        }
    }
    Ok(())
}
