//! Command-line front end for the flood-prediction toolkit. `run` is the
//! whole program: argument parsing errors exit 2 (clap's convention),
//! runtime failures exit 1, success exits 0.

pub mod commands;
pub mod config;
pub mod data;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::config::{load_config, Overrides};

const LONG_ABOUT: &str = "\
River flood prediction toolkit: CSV ingest and cleaning, exploratory \
statistics, calibrated synthetic gauge data, classical and quantum-simulated \
classifiers, benchmark tables, and water-level forecasting.

Conventions used throughout:
  * Flood labeling is strict: a day is a flood exactly when its water level \
is strictly greater than the threshold. A level equal to the threshold is \
not a flood.
  * Tied classification votes resolve toward the flood class (ensemble \
votes and nearest-neighbour ties at zero margin predict flood).
  * Train/test splits are chronological and never shuffled; the training \
partition strictly precedes the test partition in time.
  * All randomness flows from the single configured seed; identical \
invocations produce identical outputs apart from recorded wall-clock \
training times.

Output location: --out beats the HYDROQ_OUT environment variable, which \
beats the config file's out_dir, which beats ./hydroq-out. Commands only \
write inside that directory.";

#[derive(Parser)]
#[command(
    name = "hydroq",
    version,
    about = "Hybrid classical/quantum-simulated river flood prediction toolkit",
    long_about = LONG_ABOUT
)]
struct Cli {
    /// JSON run configuration (versioned; built-in defaults when absent)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Random seed override
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory override
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Flood threshold override in cm (strict: level > threshold)
    #[arg(long = "threshold-cm", global = true, value_name = "CM")]
    threshold_cm: Option<f64>,

    /// Chronological train fraction override, in (0, 1)
    #[arg(long = "train-fraction", global = true, value_name = "F")]
    train_fraction: Option<f64>,

    /// Lag-window length override
    #[arg(long, global = true, value_name = "N")]
    lags: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse configured CSV files, clean them, write canonical series and
    /// reject lists
    Ingest,
    /// Exploratory report with class shares, per-variable statistics,
    /// seasonal means, and figures
    Eda,
    /// Generate the calibrated synthetic level and precipitation series
    Synth,
    /// Fit one configured model on the training partition and save it
    Train {
        /// Model name from the config (default: the first one)
        #[arg(long)]
        model: Option<String>,
    },
    /// Load a saved model and score it on the held-out test partition
    Evaluate {
        /// Model name from the config (default: the first one)
        #[arg(long)]
        model: Option<String>,
    },
    /// Train and score every configured model; write tables and metrics CSV
    Benchmark,
    /// Forecast future water levels from the end of the series
    Forecast {
        /// Forecaster: `ar` (linear autoregression) or `qar` (variational
        /// circuit autoregression)
        #[arg(long, default_value = "ar")]
        model: String,
        /// Number of steps ahead
        #[arg(long, default_value_t = 14)]
        horizon: usize,
    },
}

/// Runs the CLI against an explicit argument list and returns the exit
/// code. `main` passes `std::env::args_os()`; tests pass synthetic lists.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is
            // a usage error.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };

    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        threshold_cm: cli.threshold_cm,
        train_fraction: cli.train_fraction,
        lags: cli.lags,
    };
    let config = match load_config(cli.config.as_deref(), &overrides) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    let outcome = match &cli.command {
        Command::Ingest => commands::cmd_ingest(&config).map(|s| (s, true)),
        Command::Eda => commands::cmd_eda(&config).map(|s| (s, true)),
        Command::Synth => commands::cmd_synth(&config).map(|s| (s, true)),
        Command::Train { model } => {
            commands::cmd_train(&config, model.as_deref()).map(|s| (s, true))
        }
        Command::Evaluate { model } => {
            commands::cmd_evaluate(&config, model.as_deref()).map(|s| (s, true))
        }
        Command::Benchmark => commands::cmd_benchmark(&config),
        Command::Forecast { model, horizon } => {
            commands::cmd_forecast(&config, model, *horizon).map(|s| (s, true))
        }
    };
    match outcome {
        Ok((summary, clean)) => {
            print!("{summary}");
            if clean {
                0
            } else {
                eprintln!("error: at least one model failed; see the benchmark tables");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
