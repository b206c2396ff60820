//! Model suite runner for the flood classification comparison: a common
//! fit/predict surface over the classical and quantum-simulated models,
//! chronological train/test evaluation, and deterministic report output.
//! Training wall-clock is the one column excluded from byte comparisons.

use std::time::Instant;

use crate::bench::metrics::{classification_metrics, MetricsReport, CONFUSION_NOTE};
use crate::classical::boost::{fit_adaboost, fit_gbrt, AdaBoostModel, GbrtModel};
use crate::classical::forest::{fit_forest, ForestConfig, ForestModel};
use crate::classical::knn::{knn_predict_batch, KnnTask};
use crate::classical::svm::{rbf_gamma_default, train_svm, train_svm_precomputed, SvmKernel, SvmModel};
use crate::classical::tree::{fit_tree, TreeModel, TreeTask};
use crate::error::{Error, Result};
use crate::hydrodata::transform::{chrono_split, ScaleMode, Scaler};
use crate::hydrodata::{HydroDataset, TargetKind};
use crate::qboost::{ensemble_predict, train_qboost, Ensemble, QboostVariant};
use crate::qkernel::{kernel_matrix, Entanglement, FeatureMapSpec};
use crate::vqml::{
    train_variational, vqc_predict_values, AnsatzSpec, Encoding, Loss, Readout, TrainConfig,
    VariationalModel,
};

/// Model families runnable by the suite. Hyperparameters live inline so a
/// spec is a single self-describing value.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// Predicts the most common training label (ties choose flood).
    Majority,
    /// Predicts flood for every row.
    AlwaysPositive,
    Knn { k: usize },
    Tree { max_depth: usize, min_leaf: usize },
    Forest { n_trees: usize, max_depth: usize, min_leaf: usize },
    AdaBoost { rounds: usize },
    Gbrt { rounds: usize, shrinkage: f64 },
    SvmRbf { c: f64, gamma: Option<f64> },
    SvmLinear { c: f64 },
    /// SVM over the quantum fidelity kernel.
    Qsvm { c: f64, reps: usize },
    /// Variational circuit classifier trained on ±1 targets.
    Vqc { depth: usize, reps: usize, learning_rate: f64, iters: usize },
    /// Stump ensemble selected by annealing a quadratic binary objective.
    Qboost { pool: usize, lambda_factor: f64, plus: bool },
}

impl ModelKind {
    pub fn is_quantum(&self) -> bool {
        matches!(
            self,
            ModelKind::Qsvm { .. } | ModelKind::Vqc { .. } | ModelKind::Qboost { .. }
        )
    }

    /// Feature scaling each family needs: distance and kernel models get
    /// z-scores, circuit models get angles in [0, π], trees get raw values.
    fn scale_mode(&self) -> Option<ScaleMode> {
        match self {
            ModelKind::Knn { .. } | ModelKind::SvmRbf { .. } | ModelKind::SvmLinear { .. } => {
                Some(ScaleMode::ZScore)
            }
            ModelKind::Qsvm { .. } | ModelKind::Vqc { .. } => Some(ScaleMode::MinMax0Pi),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub kind: ModelKind,
    /// Cap on training rows; the most recent rows are kept. Lets the slow
    /// simulated models run on a subsample while the fast ones see
    /// everything.
    pub max_rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelInner {
    Majority { label: u8 },
    AlwaysPositive,
    Knn { k: usize, xs: Vec<Vec<f64>>, ys: Vec<f64> },
    Tree(TreeModel),
    Forest(ForestModel),
    AdaBoost(AdaBoostModel),
    Gbrt(GbrtModel),
    Svm(SvmModel),
    Qsvm { model: SvmModel, map: FeatureMapSpec, train_x: Vec<Vec<f64>> },
    Vqc(VariationalModel),
    Qboost(Ensemble),
}

/// A fitted model plus the scaler its inputs must pass through.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub name: String,
    pub scaler: Option<Scaler>,
    pub inner: ModelInner,
}

fn to_signed(ys: &[u8]) -> Vec<f64> {
    ys.iter().map(|&y| if y == 1 { 1.0 } else { -1.0 }).collect()
}

fn entanglement_for(n_features: usize) -> Entanglement {
    if n_features > 2 {
        Entanglement::Ring
    } else {
        Entanglement::Linear
    }
}

/// Fits one spec on 0/1 flood labels. `max_rows` keeps the latest rows.
pub fn fit_model(spec: &ModelSpec, xs: &[Vec<f64>], ys: &[u8], seed: u64) -> Result<TrainedModel> {
    if xs.len() != ys.len() {
        return Err(Error::DimMismatch(format!(
            "{} rows but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if ys.iter().any(|&y| y > 1) {
        return Err(Error::Config("labels must be 0 or 1".into()));
    }
    let start = match spec.max_rows {
        Some(cap) if cap > 0 => xs.len().saturating_sub(cap),
        Some(_) => return Err(Error::Config("max_rows must be at least 1".into())),
        None => 0,
    };
    let xs = &xs[start..];
    let ys = &ys[start..];

    let scaler = match spec.kind.scale_mode() {
        Some(mode) => Some(Scaler::fit(xs, mode)?),
        None => None,
    };
    let scaled;
    let xs_model: &[Vec<f64>] = match &scaler {
        Some(s) => {
            scaled = s.transform(xs)?;
            &scaled
        }
        None => xs,
    };
    let ys_f: Vec<f64> = ys.iter().map(|&y| f64::from(y)).collect();

    let inner = match &spec.kind {
        ModelKind::Majority => {
            let positives = ys.iter().filter(|&&y| y == 1).count();
            let label = u8::from(2 * positives >= ys.len());
            ModelInner::Majority { label }
        }
        ModelKind::AlwaysPositive => ModelInner::AlwaysPositive,
        ModelKind::Knn { k } => ModelInner::Knn {
            k: *k,
            xs: xs_model.to_vec(),
            ys: to_signed(ys),
        },
        ModelKind::Tree { max_depth, min_leaf } => ModelInner::Tree(fit_tree(
            xs_model,
            &to_signed(ys),
            TreeTask::Classify,
            *max_depth,
            *min_leaf,
        )?),
        ModelKind::Forest { n_trees, max_depth, min_leaf } => {
            let cfg = ForestConfig {
                n_trees: *n_trees,
                max_depth: *max_depth,
                min_leaf: *min_leaf,
                seed,
                bootstrap: true,
                feature_subsample: true,
            };
            ModelInner::Forest(fit_forest(xs_model, &to_signed(ys), TreeTask::Classify, &cfg)?)
        }
        ModelKind::AdaBoost { rounds } => {
            ModelInner::AdaBoost(fit_adaboost(xs_model, &to_signed(ys), *rounds)?)
        }
        ModelKind::Gbrt { rounds, shrinkage } => {
            // Regression on the 0/1 labels; prediction thresholds at 1/2.
            ModelInner::Gbrt(fit_gbrt(xs_model, &ys_f, *rounds, *shrinkage)?)
        }
        ModelKind::SvmRbf { c, gamma } => {
            let gamma = gamma.unwrap_or_else(|| rbf_gamma_default(xs_model));
            ModelInner::Svm(train_svm(
                xs_model,
                &to_signed(ys),
                SvmKernel::Rbf { gamma },
                *c,
                1e-3,
            )?)
        }
        ModelKind::SvmLinear { c } => ModelInner::Svm(train_svm(
            xs_model,
            &to_signed(ys),
            SvmKernel::Linear,
            *c,
            1e-3,
        )?),
        ModelKind::Qsvm { c, reps } => {
            let d = xs_model.first().map_or(0, Vec::len);
            let map = FeatureMapSpec::new(d, *reps, entanglement_for(d))?;
            let gram = kernel_matrix(xs_model, xs_model, &map)?;
            let model = train_svm_precomputed(&gram.values, &to_signed(ys), *c, 1e-3)?;
            ModelInner::Qsvm {
                model,
                map,
                train_x: xs_model.to_vec(),
            }
        }
        ModelKind::Vqc { depth, reps, learning_rate, iters } => {
            let d = xs_model.first().map_or(0, Vec::len);
            let map = FeatureMapSpec::new(d, *reps, entanglement_for(d))?;
            let ansatz = AnsatzSpec::new(d, *depth)?;
            let n_params = ansatz.n_params();
            let template = VariationalModel::new(
                Encoding::ZzMap(map),
                ansatz,
                vec![0.0; n_params],
                Readout::AffineZ0,
            )?;
            let cfg = TrainConfig {
                learning_rate: *learning_rate,
                max_iters: *iters,
                seed,
                loss: Loss::SquaredError,
                log_every: usize::MAX,
            };
            let (model, _history) = train_variational(&template, xs_model, &to_signed(ys), &cfg)?;
            ModelInner::Vqc(model)
        }
        ModelKind::Qboost { pool, lambda_factor, plus } => {
            let lambda = lambda_factor * xs_model.len() as f64;
            let variant = if *plus {
                QboostVariant::QboostPlus
            } else {
                QboostVariant::Qboost
            };
            ModelInner::Qboost(train_qboost(
                xs_model,
                &to_signed(ys),
                *pool,
                lambda,
                variant,
                seed,
            )?)
        }
    };
    Ok(TrainedModel {
        name: spec.name.clone(),
        scaler,
        inner,
    })
}

/// Predicts 0/1 flood labels; applies the stored scaler first.
pub fn predict_model(model: &TrainedModel, xs: &[Vec<f64>]) -> Result<Vec<u8>> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut scaled;
    let xs: &[Vec<f64>] = match &model.scaler {
        Some(s) => {
            scaled = s.transform(xs)?;
            if matches!(model.inner, ModelInner::Qsvm { .. } | ModelInner::Vqc(_)) {
                // Rows beyond the training min/max would leave the
                // encoding domain; the angle saturates at its ends.
                for row in &mut scaled {
                    for v in row {
                        *v = v.clamp(0.0, std::f64::consts::PI);
                    }
                }
            }
            &scaled
        }
        None => xs,
    };
    let labels = match &model.inner {
        ModelInner::Majority { label } => vec![*label; xs.len()],
        ModelInner::AlwaysPositive => vec![1u8; xs.len()],
        ModelInner::Knn { k, xs: train_x, ys } => {
            knn_predict_batch(train_x, ys, xs, *k, KnnTask::Classify)?
                .iter()
                .map(|&v| u8::from(v >= 0.0))
                .collect()
        }
        ModelInner::Tree(tree) => tree.predict(xs).iter().map(|&v| u8::from(v >= 0.0)).collect(),
        ModelInner::Forest(forest) => {
            forest.predict(xs).iter().map(|&v| u8::from(v >= 0.0)).collect()
        }
        ModelInner::AdaBoost(model) => {
            model.predict(xs).iter().map(|&v| u8::from(v >= 0.0)).collect()
        }
        ModelInner::Gbrt(model) => model.predict(xs).iter().map(|&v| u8::from(v >= 0.5)).collect(),
        ModelInner::Svm(svm) => svm.predict(xs)?,
        ModelInner::Qsvm { model, map, train_x } => {
            let rows = kernel_matrix(xs, train_x, map)?;
            model.predict_from_kernel_rows(&rows.values)?
        }
        ModelInner::Vqc(model) => vqc_predict_values(model, xs)?
            .iter()
            .map(|&v| u8::from(v >= 0.0))
            .collect(),
        ModelInner::Qboost(ensemble) => ensemble_predict(ensemble, xs)
            .iter()
            .map(|&v| u8::from(v >= 0.0))
            .collect(),
    };
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub models: Vec<ModelSpec>,
    pub seed: u64,
    pub train_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Metrics(MetricsReport),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkEntry {
    pub name: String,
    pub quantum: bool,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub entries: Vec<BenchmarkEntry>,
    pub n_train: usize,
    pub n_test: usize,
}

impl BenchmarkReport {
    pub fn all_succeeded(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.outcome, Outcome::Metrics(_)))
    }

    /// One CSV row per model; the timing column is last so determinism
    /// checks can drop it by position.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "model,task,seed,status,tp,tn,fp,fn,accuracy,precision,recall,f1,\
             balanced_accuracy,zero_division,training_time_s\n",
        );
        for entry in &self.entries {
            match &entry.outcome {
                Outcome::Metrics(m) => {
                    out.push_str(&format!(
                        "{},{},{},ok,{},{},{},{},{},{},{},{},{},{},{}\n",
                        m.model_name,
                        m.task.name(),
                        m.seed,
                        m.true_pos,
                        m.true_neg,
                        m.false_pos,
                        m.false_neg,
                        m.accuracy,
                        m.precision,
                        m.recall,
                        m.f1,
                        m.balanced_accuracy,
                        m.zero_division,
                        m.training_time_s
                    ));
                }
                Outcome::Failed(reason) => {
                    let reason = reason.replace([',', '\n'], ";");
                    out.push_str(&format!(
                        "{},classification,,failed({reason}),,,,,,,,,,,\n",
                        entry.name
                    ));
                }
            }
        }
        out
    }

    /// Plain-text results table for one model family.
    pub fn render_table(&self, quantum: bool) -> String {
        let title = if quantum {
            "quantum-simulated models"
        } else {
            "classical models"
        };
        let header = [
            "Model", "Accuracy", "Precision", "Recall", "F1", "Balanced", "Train s",
        ];
        let mut rows: Vec<[String; 7]> = Vec::new();
        let mut any_zero_division = false;
        for entry in self.entries.iter().filter(|e| e.quantum == quantum) {
            match &entry.outcome {
                Outcome::Metrics(m) => {
                    if m.zero_division {
                        any_zero_division = true;
                    }
                    let flag = if m.zero_division { "*" } else { "" };
                    rows.push([
                        format!("{}{flag}", entry.name),
                        format!("{:.4}", m.accuracy),
                        format!("{:.4}", m.precision),
                        format!("{:.4}", m.recall),
                        format!("{:.4}", m.f1),
                        format!("{:.4}", m.balanced_accuracy),
                        format!("{:.3}", m.training_time_s),
                    ]);
                }
                Outcome::Failed(reason) => {
                    rows.push([
                        entry.name.clone(),
                        format!("failed: {reason}"),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ]);
                }
            }
        }
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = format!("{title} (test rows: {})\n", self.n_test);
        let line = |cells: &[String]| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let header_cells: Vec<String> = header.iter().map(|h| (*h).to_string()).collect();
        out.push_str(&line(&header_cells));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for row in &rows {
            out.push_str(&line(row.as_slice()));
            out.push('\n');
        }
        if any_zero_division {
            out.push_str("* a 0/0 rate occurred and was reported as 0\n");
        }
        out.push_str(CONFUSION_NOTE);
        out.push('\n');
        out
    }
}

/// Trains and scores every spec on a chronological split of the dataset.
/// A model that errors is recorded as failed and the suite moves on.
pub fn run_benchmark(config: &SuiteConfig, dataset: &HydroDataset) -> Result<BenchmarkReport> {
    if dataset.target_kind != TargetKind::FloodFlag {
        return Err(Error::Config(
            "benchmark suite expects a flood flag target".into(),
        ));
    }
    dataset.validate()?;
    let (train, test) = chrono_split(dataset, config.train_fraction)?;
    let y_train: Vec<u8> = train.target.iter().map(|&v| v as u8).collect();
    let y_test: Vec<u8> = test.target.iter().map(|&v| v as u8).collect();

    let mut entries = Vec::with_capacity(config.models.len());
    for spec in &config.models {
        let started = Instant::now();
        let fitted = fit_model(spec, &train.features, &y_train, config.seed);
        let elapsed = started.elapsed().as_secs_f64();
        let outcome = match fitted.and_then(|model| predict_model(&model, &test.features)) {
            Ok(predictions) => match classification_metrics(&y_test, &predictions) {
                Ok(mut metrics) => {
                    metrics.model_name = spec.name.clone();
                    metrics.seed = config.seed;
                    metrics.training_time_s = elapsed;
                    Outcome::Metrics(metrics)
                }
                Err(e) => Outcome::Failed(e.to_string()),
            },
            Err(e) => Outcome::Failed(e.to_string()),
        };
        entries.push(BenchmarkEntry {
            name: spec.name.clone(),
            quantum: spec.kind.is_quantum(),
            outcome,
        });
    }
    Ok(BenchmarkReport {
        entries,
        n_train: train.n_rows(),
        n_test: test.n_rows(),
    })
}
