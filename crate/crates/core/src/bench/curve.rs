//! Learning curves over chronological subsets: how test-period accuracy
//! responds to the amount of history a model trains on. Validation folds
//! are contiguous blocks from the end of the series, never shuffled, so
//! no fold sees the future of another.

use crate::bench::metrics::classification_metrics;
use crate::bench::report::{fit_model, predict_model, ModelSpec};
use crate::error::{Error, Result};
use crate::hydrodata::{HydroDataset, TargetKind};

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub fraction: f64,
    pub n_train: usize,
    /// Accuracy on the rows the model trained on.
    pub train_score: f64,
    /// Mean accuracy over the validation folds.
    pub cv_mean: f64,
    /// Population standard deviation over the validation folds.
    pub cv_std: f64,
}

/// Trains `spec` on growing chronological prefixes and scores each fit on
/// `k_folds` contiguous blocks held out at the end of the series. A
/// fraction whose prefix holds fewer than two rows of either class is
/// skipped and reported in the warnings; the returned points cover
/// exactly the fractions that ran.
pub fn learning_curve(
    spec: &ModelSpec,
    dataset: &HydroDataset,
    fractions: &[f64],
    k_folds: usize,
    seed: u64,
) -> Result<(Vec<CurvePoint>, Vec<String>)> {
    if dataset.target_kind != TargetKind::FloodFlag {
        return Err(Error::Config(
            "learning curves are defined for the flood classification task".into(),
        ));
    }
    dataset.validate()?;
    if fractions.is_empty() {
        return Err(Error::EmptyInput);
    }
    for pair in fractions.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Config(format!(
                "fractions must increase strictly: {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
        return Err(Error::Config("fractions must lie in (0, 1]".into()));
    }
    if k_folds == 0 {
        return Err(Error::Config("at least one validation fold required".into()));
    }

    let n = dataset.n_rows();
    // A quarter of the data (at least one row per fold) validates.
    let pool = ((n as f64 * 0.25).ceil() as usize).max(k_folds);
    if pool >= n || n - pool < 2 {
        return Err(Error::Config(format!(
            "{n} rows cannot support {k_folds} validation folds"
        )));
    }
    let n_fit = n - pool;
    let labels: Vec<u8> = dataset.target.iter().map(|&v| v as u8).collect();

    // Contiguous fold bounds over the validation pool.
    let mut folds: Vec<(usize, usize)> = Vec::with_capacity(k_folds);
    let base = pool / k_folds;
    let extra = pool % k_folds;
    let mut cursor = n_fit;
    for i in 0..k_folds {
        let len = base + usize::from(i < extra);
        folds.push((cursor, cursor + len));
        cursor += len;
    }

    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for &fraction in fractions {
        let n_train = ((fraction * n_fit as f64).ceil() as usize).clamp(1, n_fit);
        let xs = &dataset.features[..n_train];
        let ys = &labels[..n_train];
        let positives = ys.iter().filter(|&&y| y == 1).count();
        let negatives = n_train - positives;
        if positives < 2 || negatives < 2 {
            warnings.push(format!(
                "fraction {fraction} skipped: {n_train} rows hold {positives} flood and \
                 {negatives} non-flood samples (need 2 of each)"
            ));
            continue;
        }
        let model = fit_model(
            &ModelSpec {
                max_rows: None,
                ..spec.clone()
            },
            xs,
            ys,
            seed,
        )?;
        let train_pred = predict_model(&model, xs)?;
        let train_score = classification_metrics(ys, &train_pred)?.accuracy;

        let mut fold_scores = Vec::with_capacity(k_folds);
        for &(lo, hi) in &folds {
            let pred = predict_model(&model, &dataset.features[lo..hi])?;
            fold_scores.push(classification_metrics(&labels[lo..hi], &pred)?.accuracy);
        }
        let cv_mean = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
        let cv_var = fold_scores
            .iter()
            .map(|s| (s - cv_mean).powi(2))
            .sum::<f64>()
            / fold_scores.len() as f64;
        points.push(CurvePoint {
            fraction,
            n_train,
            train_score,
            cv_mean,
            cv_std: cv_var.sqrt(),
        });
    }
    Ok((points, warnings))
}

/// Sidecar rows for plotting: `fraction,n_train,train_score,cv_mean,cv_std`.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("fraction,n_train,train_score,cv_mean,cv_std\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.fraction, p.n_train, p.train_score, p.cv_mean, p.cv_std
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::report::ModelKind;
    use chrono::NaiveDate;

    fn separable_dataset(n: usize) -> HydroDataset {
        let start = NaiveDate::from_ymd_opt(2003, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let mut features = Vec::new();
        let mut target = Vec::new();
        let mut timestamps = Vec::new();
        for i in 0..n {
            let a = (i as f64 * 0.37).sin().abs();
            let b = (i as f64 * 0.11).cos().abs();
            features.push(vec![a, b]);
            target.push(f64::from(u8::from(a > 0.6)));
            timestamps.push(start + chrono::Duration::days(i as i64));
        }
        HydroDataset {
            feature_names: vec!["level_lag_1".into(), "rain_lag_1".into()],
            features,
            target,
            target_kind: TargetKind::FloodFlag,
            timestamps,
            provenance: vec!["toy".into()],
        }
    }

    fn tree_spec() -> ModelSpec {
        ModelSpec {
            name: "tree".into(),
            kind: ModelKind::Tree { max_depth: 6, min_leaf: 1 },
            max_rows: None,
        }
    }

    #[test]
    fn row_count_matches_non_skipped_fractions() {
        let dataset = separable_dataset(200);
        let fractions: Vec<f64> = (1..=12).map(|i| f64::from(i) / 12.0).collect();
        let (points, warnings) =
            learning_curve(&tree_spec(), &dataset, &fractions, 3, 9).unwrap();
        assert_eq!(points.len() + warnings.len(), fractions.len());
        for pair in points.windows(2) {
            assert!(pair[1].n_train >= pair[0].n_train);
        }
    }

    #[test]
    fn separable_data_trains_to_one_at_full_fraction() {
        let dataset = separable_dataset(200);
        let (points, _) =
            learning_curve(&tree_spec(), &dataset, &[0.5, 1.0], 3, 9).unwrap();
        let last = points.last().unwrap();
        assert_eq!(last.fraction, 1.0);
        assert_eq!(last.n_train, 150);
        assert_eq!(last.train_score, 1.0);
    }

    #[test]
    fn train_rarely_below_cv() {
        let dataset = separable_dataset(240);
        let fractions: Vec<f64> = (1..=12).map(|i| f64::from(i) / 12.0).collect();
        let (points, _) = learning_curve(&tree_spec(), &dataset, &fractions, 3, 4).unwrap();
        let violations = points
            .iter()
            .filter(|p| p.train_score + 1e-9 < p.cv_mean)
            .count();
        assert!(violations <= 2, "{violations} of {} points", points.len());
    }

    #[test]
    fn class_starved_fraction_skipped_with_warning() {
        let mut dataset = separable_dataset(200);
        // First 60 rows all non-flood: tiny prefixes lack positives.
        for v in dataset.target.iter_mut().take(60) {
            *v = 0.0;
        }
        let (points, warnings) =
            learning_curve(&tree_spec(), &dataset, &[0.05, 0.8], 3, 9).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("skipped"));
    }

    #[test]
    fn bad_fraction_lists_rejected() {
        let dataset = separable_dataset(100);
        for fractions in [vec![], vec![0.5, 0.5], vec![0.8, 0.4], vec![0.2, 1.5]] {
            assert!(learning_curve(&tree_spec(), &dataset, &fractions, 3, 0).is_err());
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let dataset = separable_dataset(160);
        let run = || {
            let spec = ModelSpec {
                name: "forest".into(),
                kind: ModelKind::Forest { n_trees: 5, max_depth: 4, min_leaf: 1 },
                max_rows: None,
            };
            learning_curve(&spec, &dataset, &[0.4, 0.8], 4, 21).unwrap()
        };
        let (a, aw) = run();
        let (b, bw) = run();
        assert_eq!(a, b);
        assert_eq!(aw, bw);
        assert_eq!(curve_csv(&a), curve_csv(&b));
    }
}
