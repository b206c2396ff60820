//! One function per subcommand. Every function returns the text it wants
//! printed; all files land under the configured output directory.

use std::path::{Path, PathBuf};

use hydroq_core::bench::metrics::classification_metrics;
use hydroq_core::bench::plot::{box_plot, histogram_plot, line_plot, Series};
use hydroq_core::bench::report::{fit_model, predict_model, run_benchmark, SuiteConfig};
use hydroq_core::classical::ar::{ar_forecast, fit_ar};
use hydroq_core::hydrodata::eda::eda_report;
use hydroq_core::hydrodata::ingest::write_records_csv;
use hydroq_core::hydrodata::synth::synth_generate;
use hydroq_core::hydrodata::transform::{chrono_split, label_floods, ScaleMode, Scaler};
use hydroq_core::hydrodata::{TargetKind, Variable};
use hydroq_core::persist::{load_model, save_model};
use hydroq_core::qsim::MAX_QUBITS;
use hydroq_core::vqml::{
    qar_forecast, train_variational, write_cost_history_csv, AnsatzSpec, Encoding, Loss, Readout,
    TrainConfig, VariationalModel,
};
use hydroq_core::{Error, Result};

use crate::config::RunConfig;
use crate::data::{ingest_variable, load_data, supervised_dataset, LoadedData};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.display().to_string(),
        source: e,
    }
}

fn ensure_dir(config: &RunConfig, sub: &str) -> Result<PathBuf> {
    let dir = config.out_dir.join(sub);
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    Ok(dir)
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(io_err(path))
}

fn records_csv(records: &[hydroq_core::hydrodata::TimeSeriesRecord]) -> Result<String> {
    let mut buffer = Vec::new();
    write_records_csv(records, &mut buffer).map_err(|e| Error::Io {
        path: "<buffer>".into(),
        source: e,
    })?;
    String::from_utf8(buffer).map_err(|e| Error::Config(format!("non-utf8 csv: {e}")))
}

pub fn cmd_ingest(config: &RunConfig) -> Result<String> {
    let data = config.data.as_ref().ok_or_else(|| {
        Error::Config("the ingest command needs a `data` section in the config".into())
    })?;
    let dir = ensure_dir(config, "ingest")?;
    let mut summary = String::new();

    let sources = std::iter::once((&data.level_path, Variable::WaterLevelCm, "level"))
        .chain(
            data.precipitation_path
                .iter()
                .map(|p| (p, Variable::PrecipitationMm, "precipitation")),
        );
    for (path, variable, stem) in sources {
        let (report, cleaned) = ingest_variable(path, data, variable)?;
        write_text(&dir.join(format!("{stem}_clean.csv")), &records_csv(&cleaned.records)?)?;
        let mut rejects = Vec::new();
        report
            .write_rejects(&mut rejects)
            .map_err(|e| Error::Io {
                path: "<buffer>".into(),
                source: e,
            })?;
        write_text(
            &dir.join(format!("{stem}_rejects.csv")),
            &String::from_utf8_lossy(&rejects),
        )?;
        let mut log = String::new();
        log.push_str(&format!("source: {}\n", path.display()));
        log.push_str(&format!("kept: {}\n", cleaned.records.len()));
        log.push_str(&format!("rejected: {}\n", report.rejects.len()));
        log.push_str(&format!("gaps filled: {}\n", cleaned.log.fills.len()));
        log.push_str(&format!("rows dropped: {}\n", cleaned.log.dropped.len()));
        log.push_str(&format!("outliers flagged: {}\n", cleaned.log.outlier_count));
        for line in &report.log {
            log.push_str(line);
            log.push('\n');
        }
        write_text(&dir.join(format!("{stem}_log.txt")), &log)?;
        summary.push_str(&format!(
            "{}: kept {}, rejected {}, filled {}, dropped {}, flagged {}\n",
            path.display(),
            cleaned.records.len(),
            report.rejects.len(),
            cleaned.log.fills.len(),
            cleaned.log.dropped.len(),
            cleaned.log.outlier_count
        ));
    }
    summary.push_str(&format!("cleaned files written to {}\n", dir.display()));
    Ok(summary)
}

pub fn cmd_synth(config: &RunConfig) -> Result<String> {
    let dir = ensure_dir(config, "synth")?;
    let calib = config.synth.to_calib(config.threshold_cm)?;
    let synth = synth_generate(config.seed, &calib)?;
    write_text(&dir.join("level.csv"), &records_csv(&synth.level)?)?;
    write_text(&dir.join("precipitation.csv"), &records_csv(&synth.precipitation)?)?;

    let levels: Vec<f64> = synth.level.iter().filter_map(|r| r.value).collect();
    let rains: Vec<f64> = synth.precipitation.iter().filter_map(|r| r.value).collect();
    let floods = label_floods(&levels, calib.threshold_cm);
    let flood_count: usize = floods.iter().map(|&f| usize::from(f)).sum();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut summary = String::new();
    summary.push_str(&format!("days: {}\n", calib.days));
    summary.push_str(&format!(
        "flood days (level > {} cm): {} ({:.2}%)\n",
        calib.threshold_cm,
        flood_count,
        100.0 * flood_count as f64 / levels.len() as f64
    ));
    summary.push_str(&format!(
        "level mean {:.2} cm, max {:.2} cm\n",
        mean(&levels),
        max(&levels)
    ));
    summary.push_str(&format!(
        "precipitation mean {:.2} mm, max {:.2} mm\n",
        mean(&rains),
        max(&rains)
    ));
    summary.push_str(&format!("series written to {}\n", dir.display()));
    write_text(&dir.join("summary.txt"), &summary)?;
    Ok(summary)
}

pub fn cmd_eda(config: &RunConfig) -> Result<String> {
    let dir = ensure_dir(config, "eda")?;
    let data = load_data(config)?;
    let report = eda_report(
        &data.level,
        data.precipitation.as_ref(),
        config.threshold_cm,
    )?;
    write_text(&dir.join("report.txt"), &report.render_text())?;
    write_text(&dir.join("report.csv"), &report.render_csv())?;

    let values = data.level.values();
    let hist = histogram_plot(&values, 30, "water level distribution", "level (cm)")?;
    hist.write(&dir, "level_hist")?;

    let points: Vec<(f64, f64)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as f64, v))
        .collect();
    let series = line_plot(
        &[Series {
            name: "water level".into(),
            points,
        }],
        "water level over time",
        "day index",
        "level (cm)",
    )?;
    series.write(&dir, "level_series")?;

    const MONTHS: [&str; 12] = [
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
    ];
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for (month_index, name) in MONTHS.iter().enumerate() {
        let month = month_index as u32 + 1;
        let values: Vec<f64> = data
            .level
            .records
            .iter()
            .filter(|r| chrono::Datelike::month(&r.timestamp.date()) == month)
            .filter_map(|r| r.value)
            .collect();
        if !values.is_empty() {
            groups.push(((*name).to_string(), values));
        }
    }
    if !groups.is_empty() {
        let boxes = box_plot(&groups, "water level by month", "level (cm)")?;
        boxes.write(&dir, "monthly_levels")?;
    }

    let mut summary = String::new();
    for line in &data.log {
        summary.push_str(line);
        summary.push('\n');
    }
    summary.push_str(&report.render_text());
    summary.push_str(&format!("report and figures written to {}\n", dir.display()));
    Ok(summary)
}

fn select_model<'a>(config: &'a RunConfig, name: Option<&str>) -> Result<&'a hydroq_core::bench::report::ModelSpec> {
    match name {
        Some(name) => config
            .models
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| {
                let known: Vec<&str> = config.models.iter().map(|m| m.name.as_str()).collect();
                Error::Config(format!(
                    "unknown model `{name}`; configured models: {}",
                    known.join(", ")
                ))
            }),
        None => config
            .models
            .first()
            .ok_or_else(|| Error::Config("no models configured".into())),
    }
}

fn flood_dataset_split(
    config: &RunConfig,
    data: &LoadedData,
) -> Result<(hydroq_core::hydrodata::HydroDataset, hydroq_core::hydrodata::HydroDataset)> {
    let dataset = supervised_dataset(config, data, TargetKind::FloodFlag)?;
    chrono_split(&dataset, config.train_fraction)
}

pub fn cmd_train(config: &RunConfig, model_name: Option<&str>) -> Result<String> {
    let spec = select_model(config, model_name)?.clone();
    let data = load_data(config)?;
    let (train, _test) = flood_dataset_split(config, &data)?;
    let labels: Vec<u8> = train.target.iter().map(|&v| v as u8).collect();
    let model = fit_model(&spec, &train.features, &labels, config.seed)?;
    let dir = ensure_dir(config, "models")?;
    save_model(&dir, &spec.name, &model)?;

    let train_pred = predict_model(&model, &train.features)?;
    let metrics = classification_metrics(&labels, &train_pred)?;
    let mut summary = String::new();
    summary.push_str(&format!(
        "trained `{}` on {} rows ({} features)\n",
        spec.name,
        train.n_rows(),
        train.n_features()
    ));
    summary.push_str(&format!("training accuracy: {:.4}\n", metrics.accuracy));
    summary.push_str(&format!("model saved under {}\n", dir.display()));
    Ok(summary)
}

pub fn cmd_evaluate(config: &RunConfig, model_name: Option<&str>) -> Result<String> {
    let spec = select_model(config, model_name)?;
    let models_dir = config.out_dir.join("models");
    let model = load_model(&models_dir, &spec.name)?;
    let data = load_data(config)?;
    let (_train, test) = flood_dataset_split(config, &data)?;
    let labels: Vec<u8> = test.target.iter().map(|&v| v as u8).collect();
    let predictions = predict_model(&model, &test.features)?;
    let mut metrics = classification_metrics(&labels, &predictions)?;
    metrics.model_name = spec.name.clone();
    metrics.seed = config.seed;

    let dir = ensure_dir(config, "evaluate")?;
    write_text(&dir.join(format!("{}.txt", spec.name)), &metrics.render_text())?;
    write_text(
        &dir.join(format!("{}.kv.txt", spec.name)),
        &metrics.to_key_values(),
    )?;
    Ok(format!(
        "{}evaluation written to {}\n",
        metrics.render_text(),
        dir.display()
    ))
}

pub fn cmd_benchmark(config: &RunConfig) -> Result<(String, bool)> {
    let data = load_data(config)?;
    let dataset = supervised_dataset(config, &data, TargetKind::FloodFlag)?;
    let suite = SuiteConfig {
        models: config.models.clone(),
        seed: config.seed,
        train_fraction: config.train_fraction,
    };
    let report = run_benchmark(&suite, &dataset)?;

    let dir = ensure_dir(config, "benchmark")?;
    write_text(&dir.join("metrics.csv"), &report.to_csv())?;
    let classical = report.render_table(false);
    let quantum = report.render_table(true);
    write_text(&dir.join("table_classical.txt"), &classical)?;
    write_text(&dir.join("table_quantum.txt"), &quantum)?;
    for entry in &report.entries {
        if let hydroq_core::bench::report::Outcome::Metrics(m) = &entry.outcome {
            write_text(&dir.join(format!("{}.kv.txt", entry.name)), &m.to_key_values())?;
        }
    }

    let mut summary = String::new();
    for line in &data.log {
        summary.push_str(line);
        summary.push('\n');
    }
    summary.push_str(&classical);
    summary.push('\n');
    summary.push_str(&quantum);
    let failures: Vec<&str> = report
        .entries
        .iter()
        .filter_map(|e| match &e.outcome {
            hydroq_core::bench::report::Outcome::Failed(reason) => Some(reason.as_str()),
            hydroq_core::bench::report::Outcome::Metrics(_) => None,
        })
        .collect();
    if !failures.is_empty() {
        summary.push_str(&format!("\n{} model(s) failed:\n", failures.len()));
        for reason in &failures {
            summary.push_str(&format!("  {reason}\n"));
        }
    }
    summary.push_str(&format!("\nreports written to {}\n", dir.display()));
    Ok((summary, report.all_succeeded()))
}

pub fn cmd_forecast(config: &RunConfig, model: &str, horizon: usize) -> Result<String> {
    if horizon == 0 {
        return Err(Error::Config("forecast horizon must be at least 1".into()));
    }
    let data = load_data(config)?;
    let levels = data.level.values();
    let lags = config.lags;
    let dir = ensure_dir(config, "forecast")?;

    let predictions: Vec<f64> = match model {
        "ar" => {
            let fitted = fit_ar(&levels, lags)?;
            ar_forecast(&fitted, &levels, horizon)?
        }
        "qar" => {
            if lags > MAX_QUBITS {
                return Err(Error::Config(format!(
                    "variational forecaster uses one qubit per lag; {lags} lags exceed the \
                     {MAX_QUBITS}-qubit simulator limit"
                )));
            }
            let rows: Vec<Vec<f64>> = levels.iter().map(|&v| vec![v]).collect();
            let scaler = Scaler::fit(&rows, ScaleMode::MinMax0Pi)?;
            let scaled: Vec<f64> = scaler.transform(&rows)?.iter().map(|r| r[0]).collect();
            if scaled.len() < lags + 1 {
                return Err(Error::InsufficientHistory {
                    need: lags + 1,
                    got: scaled.len(),
                });
            }
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for t in lags..scaled.len() {
                xs.push(scaled[t - lags..t].to_vec());
                ys.push(scaled[t]);
            }
            // Angle encoding tolerates iterated predictions drifting
            // slightly outside [0, pi].
            let ansatz = AnsatzSpec::new(lags, config.forecast.depth)?;
            let n_params = ansatz.n_params();
            let template = VariationalModel::new(
                Encoding::AngleRy,
                ansatz,
                vec![0.0; n_params],
                Readout::AffineZ0,
            )?;
            let train_cfg = TrainConfig {
                learning_rate: config.forecast.learning_rate,
                max_iters: config.forecast.iters,
                seed: config.seed,
                loss: Loss::SquaredError,
                log_every: usize::MAX,
            };
            let (trained, history) = train_variational(&template, &xs, &ys, &train_cfg)?;
            let mut cost_csv = Vec::new();
            write_cost_history_csv(&history, &mut cost_csv).map_err(|e| Error::Io {
                path: "<buffer>".into(),
                source: e,
            })?;
            write_text(
                &dir.join("cost_history.csv"),
                &String::from_utf8_lossy(&cost_csv),
            )?;
            let scaled_preds = qar_forecast(&trained, &scaled, lags, horizon)?;
            let pred_rows: Vec<Vec<f64>> = scaled_preds.iter().map(|&v| vec![v]).collect();
            scaler.inverse(&pred_rows)?.iter().map(|r| r[0]).collect()
        }
        other => {
            return Err(Error::Config(format!(
                "forecast model must be `ar` or `qar`, got `{other}`"
            )))
        }
    };

    let mut csv = String::from("step,level_cm\n");
    for (i, p) in predictions.iter().enumerate() {
        csv.push_str(&format!("{},{p}\n", i + 1));
    }
    write_text(&dir.join("forecast.csv"), &csv)?;

    let mut summary = format!(
        "{model} forecast over {horizon} step(s) from {} observations ({} lags):\n",
        levels.len(),
        lags
    );
    for (i, p) in predictions.iter().enumerate() {
        summary.push_str(&format!("  t+{}: {:.2} cm\n", i + 1, p));
    }
    summary.push_str(&format!("forecast written to {}\n", dir.display()));
    Ok(summary)
}
