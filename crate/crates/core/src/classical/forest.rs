//! Random forest over the CART trees: bootstrapped rows, √d features per
//! split, majority vote or mean. Tree i draws its randomness from
//! seed + i, so serial and any future parallel fits agree exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::tree::{fit_tree_on_rows, FeatureMode, TreeModel, TreeTask};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
    /// Sample N rows with replacement per tree (≈63% unique rows); off
    /// means every tree sees the full dataset.
    pub bootstrap: bool,
    /// Restrict each split to ⌈√d⌉ randomly drawn features; off means all
    /// features everywhere.
    pub feature_subsample: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 8,
            min_leaf: 1,
            seed: 0,
            bootstrap: true,
            feature_subsample: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub task: TreeTask,
}

impl ForestModel {
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_one(x)).sum();
        match self.task {
            TreeTask::Classify => {
                if sum >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            TreeTask::Regress => sum / self.trees.len() as f64,
        }
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

pub fn fit_forest(
    xs: &[Vec<f64>],
    ys: &[f64],
    task: TreeTask,
    cfg: &ForestConfig,
) -> Result<ForestModel> {
    if cfg.n_trees == 0 {
        return Err(Error::Config("forest needs at least one tree".into()));
    }
    if xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    let n = xs.len();
    let d = xs[0].len();
    let k = (d as f64).sqrt().ceil() as usize;

    let mut trees = Vec::with_capacity(cfg.n_trees);
    for tree_index in 0..cfg.n_trees {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(tree_index as u64));
        let rows: Vec<usize> = if cfg.bootstrap {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let tree = if cfg.feature_subsample {
            fit_tree_on_rows(
                xs,
                ys,
                &rows,
                task,
                cfg.max_depth,
                cfg.min_leaf,
                &mut FeatureMode::Subsample { k, rng: &mut rng },
            )?
        } else {
            fit_tree_on_rows(
                xs,
                ys,
                &rows,
                task,
                cfg.max_depth,
                cfg.min_leaf,
                &mut FeatureMode::All,
            )?
        };
        trees.push(tree);
    }
    Ok(ForestModel { trees, task })
}
