//! Evaluation metrics computed exactly from confusion counts or residual
//! sums. Division-by-zero cases resolve to 0 and raise a flag instead of
//! poisoning reports with NaN.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classification,
    Regression,
    Forecast,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
            Task::Forecast => "forecast",
        }
    }
}

/// One model's scores. Classification fills the confusion block and its
/// derived rates; regression fills mae/mse/r2; the unused block stays NaN
/// and is skipped when rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub model_name: String,
    pub seed: u64,
    pub task: Task,
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub balanced_accuracy: f64,
    /// Set when any rate hit a 0/0 and was defined to 0.
    pub zero_division: bool,
    pub mae: f64,
    pub mse: f64,
    pub r2: f64,
    /// Wall-clock around the fit call only; excluded from determinism
    /// comparisons.
    pub training_time_s: f64,
}

impl MetricsReport {
    fn blank(task: Task) -> MetricsReport {
        MetricsReport {
            model_name: String::new(),
            seed: 0,
            task,
            true_pos: 0,
            true_neg: 0,
            false_pos: 0,
            false_neg: 0,
            accuracy: f64::NAN,
            precision: f64::NAN,
            recall: f64::NAN,
            f1: f64::NAN,
            balanced_accuracy: f64::NAN,
            zero_division: false,
            mae: f64::NAN,
            mse: f64::NAN,
            r2: f64::NAN,
            training_time_s: f64::NAN,
        }
    }

    /// Flat key=value lines, one per field, timing last.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("model={}\n", self.model_name));
        out.push_str(&format!("task={}\n", self.task.name()));
        out.push_str(&format!("seed={}\n", self.seed));
        out.push_str(&format!("tp={}\n", self.true_pos));
        out.push_str(&format!("tn={}\n", self.true_neg));
        out.push_str(&format!("fp={}\n", self.false_pos));
        out.push_str(&format!("fn={}\n", self.false_neg));
        for (key, v) in [
            ("accuracy", self.accuracy),
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
            ("balanced_accuracy", self.balanced_accuracy),
            ("mae", self.mae),
            ("mse", self.mse),
            ("r2", self.r2),
        ] {
            out.push_str(&format!("{key}={v}\n"));
        }
        out.push_str(&format!("zero_division={}\n", self.zero_division));
        out.push_str(&format!("training_time_s={}\n", self.training_time_s));
        out
    }
}

/// 0/0 convention: the rate is 0 and the flag records that it fired.
fn rate(numerator: usize, denominator: usize, flag: &mut bool) -> f64 {
    if denominator == 0 {
        *flag = true;
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Metrics from a confusion matrix given directly as counts.
pub fn metrics_from_confusion(
    true_pos: usize,
    true_neg: usize,
    false_pos: usize,
    false_neg: usize,
) -> Result<MetricsReport> {
    let total = true_pos + true_neg + false_pos + false_neg;
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let mut zero_division = false;
    let accuracy = (true_pos + true_neg) as f64 / total as f64;
    let precision = rate(true_pos, true_pos + false_pos, &mut zero_division);
    let recall = rate(true_pos, true_pos + false_neg, &mut zero_division);
    let f1 = if precision + recall == 0.0 {
        zero_division = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let tpr = rate(true_pos, true_pos + false_neg, &mut zero_division);
    let tnr = rate(true_neg, true_neg + false_pos, &mut zero_division);
    let balanced_accuracy = (tpr + tnr) / 2.0;
    Ok(MetricsReport {
        true_pos,
        true_neg,
        false_pos,
        false_neg,
        accuracy,
        precision,
        recall,
        f1,
        balanced_accuracy,
        zero_division,
        ..MetricsReport::blank(Task::Classification)
    })
}

/// Binary classification metrics; labels must be 0 or 1.
pub fn classification_metrics(y_true: &[u8], y_pred: &[u8]) -> Result<MetricsReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimMismatch(format!(
            "{} truths vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput);
    }
    if y_true.iter().chain(y_pred).any(|&y| y > 1) {
        return Err(Error::Config("labels must be 0 or 1".into()));
    }
    let mut tp = 0;
    let mut tn = 0;
    let mut fp = 0;
    let mut fn_count = 0;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (1, 1) => tp += 1,
            (0, 0) => tn += 1,
            (0, 1) => fp += 1,
            _ => fn_count += 1,
        }
    }
    metrics_from_confusion(tp, tn, fp, fn_count)
}

/// MAE, MSE, and R². Zero-variance truth pins R² to 0 by convention.
pub fn regression_metrics(y_true: &[f64], y_pred: &[f64]) -> Result<MetricsReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimMismatch(format!(
            "{} truths vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = y_true.len() as f64;
    let mae = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p).abs())
        .sum::<f64>()
        / n;
    let sse: f64 = y_true.iter().zip(y_pred).map(|(t, p)| (t - p).powi(2)).sum();
    let mse = sse / n;
    let mean = y_true.iter().sum::<f64>() / n;
    let sst: f64 = y_true.iter().map(|t| (t - mean).powi(2)).sum();
    let r2 = if sst <= 1e-14 { 0.0 } else { 1.0 - sse / sst };
    Ok(MetricsReport {
        mae,
        mse,
        r2,
        ..MetricsReport::blank(Task::Regression)
    })
}

/// Footer attached to every rendered report. The zero-error observation
/// makes the template self-checking: headline numbers inconsistent with
/// the printed counts cannot slip through unnoticed.
pub const CONFUSION_NOTE: &str = "note: all headline metrics derive from the printed confusion \
counts; a zero-error matrix forces accuracy 1.0, so any lower accuracy quoted alongside such a \
matrix is inconsistent with its own counts. 0/0 rates are reported as 0 and flagged.";

impl MetricsReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("model: {}\n", self.model_name));
        out.push_str(&format!("task: {}\n", self.task.name()));
        if self.task == Task::Classification {
            out.push_str(&format!(
                "confusion [[tn, fp], [fn, tp]]: [[{}, {}], [{}, {}]]\n",
                self.true_neg, self.false_pos, self.false_neg, self.true_pos
            ));
            out.push_str(&format!("accuracy: {:.4}\n", self.accuracy));
            out.push_str(&format!("precision: {:.4}\n", self.precision));
            out.push_str(&format!("recall: {:.4}\n", self.recall));
            out.push_str(&format!("f1: {:.4}\n", self.f1));
            out.push_str(&format!("balanced accuracy: {:.4}\n", self.balanced_accuracy));
            if self.zero_division {
                out.push_str("zero-division fallback used\n");
            }
        } else {
            out.push_str(&format!("mae: {:.6}\n", self.mae));
            out.push_str(&format!("mse: {:.6}\n", self.mse));
            out.push_str(&format!("r2: {:.6}\n", self.r2));
        }
        if self.training_time_s.is_finite() {
            out.push_str(&format!("training time (s): {:.3}\n", self.training_time_s));
        }
        out.push_str(CONFUSION_NOTE);
        out.push('\n');
        out
    }
}
