//! Boosted stump ensembles: discrete AdaBoost for ±1 classification and
//! least-squares gradient boosting for regression.

use crate::classical::stump::{fit_stump, weighted_error, Stump};
use crate::classical::tree::{fit_tree, TreeModel, TreeTask};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoostModel {
    /// (stump, vote weight α) per round, in training order.
    pub members: Vec<(Stump, f64)>,
}

impl AdaBoostModel {
    /// Sign of the weighted stump vote; an exactly zero vote goes to +1.
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let score: f64 = self
            .members
            .iter()
            .map(|(s, alpha)| alpha * s.predict_one(x))
            .sum();
        if score >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

const EPS_CLAMP: f64 = 1e-10;

/// Discrete AdaBoost with stumps. Stops early when a round's weighted
/// error hits zero (the stump is kept, its weight bounded by the ε clamp)
/// or reaches 0.5 (the stump is useless and dropped).
pub fn fit_adaboost(xs: &[Vec<f64>], ys: &[f64], n_rounds: usize) -> Result<AdaBoostModel> {
    if xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if xs.len() != ys.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    for &y in ys {
        if y != 1.0 && y != -1.0 {
            return Err(Error::Config(format!("labels must be ±1, found {y}")));
        }
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(Error::DegenerateLabels);
    }
    if n_rounds == 0 {
        return Err(Error::Config("need at least one boosting round".into()));
    }

    let n = xs.len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    for _ in 0..n_rounds {
        let stump = fit_stump(xs, ys, &weights)?;
        let eps = weighted_error(&stump, xs, ys, &weights);
        if eps >= 0.5 {
            break;
        }
        let clamped = eps.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
        let alpha = 0.5 * ((1.0 - clamped) / clamped).ln();
        members.push((stump, alpha));
        if eps == 0.0 {
            break;
        }
        let mut total = 0.0;
        for i in 0..n {
            weights[i] *= (-alpha * ys[i] * stump.predict_one(&xs[i])).exp();
            total += weights[i];
        }
        for w in &mut weights {
            *w /= total;
        }
    }
    Ok(AdaBoostModel { members })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbrtModel {
    /// Training-target mean; the n_rounds = 0 model is exactly this.
    pub base: f64,
    pub shrinkage: f64,
    pub trees: Vec<TreeModel>,
}

impl GbrtModel {
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.base
            + self.shrinkage
                * self
                    .trees
                    .iter()
                    .map(|t| t.predict_one(x))
                    .sum::<f64>()
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

/// Least-squares gradient boosting with depth-1 regression trees: each
/// round fits the current residuals and contributes shrinkage·stump.
pub fn fit_gbrt(
    xs: &[Vec<f64>],
    ys: &[f64],
    n_rounds: usize,
    shrinkage: f64,
) -> Result<GbrtModel> {
    if xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if xs.len() != ys.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples but {} targets",
            xs.len(),
            ys.len()
        )));
    }
    if !(shrinkage > 0.0 && shrinkage.is_finite()) {
        return Err(Error::Config(format!(
            "shrinkage {shrinkage} must be positive and finite"
        )));
    }

    let n = xs.len() as f64;
    let base = ys.iter().sum::<f64>() / n;
    let mut current: Vec<f64> = vec![base; xs.len()];
    let mut trees = Vec::with_capacity(n_rounds);
    for _ in 0..n_rounds {
        let residuals: Vec<f64> = ys.iter().zip(&current).map(|(y, f)| y - f).collect();
        let tree = fit_tree(xs, &residuals, TreeTask::Regress, 1, 1)?;
        for (f, x) in current.iter_mut().zip(xs) {
            *f += shrinkage * tree.predict_one(x);
        }
        trees.push(tree);
    }
    Ok(GbrtModel {
        base,
        shrinkage,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn perfectly_separable_data_stops_after_one_round() {
        let xs = vec![vec![0.0], vec![1.0], vec![4.0], vec![5.0]];
        let ys = vec![-1.0, -1.0, 1.0, 1.0];
        let model = fit_adaboost(&xs, &ys, 10).unwrap();
        assert_eq!(model.members.len(), 1);
        assert!(model.members[0].1.is_finite());
        assert_eq!(model.predict(&xs), ys);
    }

    #[test]
    fn training_error_non_increasing_over_rounds() {
        // Overlapping 1D classes; more rounds must never hurt training
        // error for this fixture.
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![f64::from(i)]).collect();
        let ys: Vec<f64> = (0..20)
            .map(|i| {
                if i < 8 || (12..14).contains(&i) {
                    -1.0
                } else {
                    1.0
                }
            })
            .collect();
        let error_at = |rounds: usize| {
            let model = fit_adaboost(&xs, &ys, rounds).unwrap();
            model
                .predict(&xs)
                .iter()
                .zip(&ys)
                .filter(|(p, y)| p != y)
                .count()
        };
        let errs: Vec<usize> = [1, 2, 4, 8, 16].iter().map(|&r| error_at(r)).collect();
        for pair in errs.windows(2) {
            assert!(pair[1] <= pair[0], "training error rose: {errs:?}");
        }
    }

    #[test]
    fn adaboost_rejects_single_class() {
        let xs = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            fit_adaboost(&xs, &[1.0, 1.0], 3).unwrap_err(),
            Error::DegenerateLabels
        ));
    }

    #[test]
    fn gbrt_zero_rounds_predicts_mean() {
        let xs = vec![vec![0.0], vec![1.0], vec![2.0]];
        let ys = vec![1.0, 2.0, 6.0];
        let model = fit_gbrt(&xs, &ys, 0, 0.1).unwrap();
        for x in &xs {
            assert_abs_diff_eq!(model.predict_one(x), 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gbrt_reduces_training_mse() {
        let xs: Vec<Vec<f64>> = (0..16).map(|i| vec![f64::from(i)]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| if x[0] < 8.0 { 1.0 } else { 5.0 }).collect();
        let mse = |model: &GbrtModel| {
            model
                .predict(&xs)
                .iter()
                .zip(&ys)
                .map(|(p, y)| (p - y) * (p - y))
                .sum::<f64>()
                / ys.len() as f64
        };
        let short = fit_gbrt(&xs, &ys, 5, 0.1).unwrap();
        let long = fit_gbrt(&xs, &ys, 100, 0.1).unwrap();
        assert!(mse(&long) < mse(&short));
        assert!(mse(&long) < 0.05);
    }
}
