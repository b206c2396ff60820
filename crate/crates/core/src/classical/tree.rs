//! CART decision trees: Gini impurity for classification, variance
//! reduction for regression. Split candidates are midpoints of sorted
//! distinct feature values; ties go to the lowest feature index, then the
//! lowest threshold. Samples with x[feature] ≤ threshold go left.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeTask {
    /// Labels in {−1, +1}; leaves vote the majority (ties → +1).
    Classify,
    /// Real targets; leaves hold the mean.
    Regress,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn predict(&self, x: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { value } => *value,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub root: TreeNode,
    pub task: TreeTask,
    pub max_depth: usize,
}

impl TreeModel {
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.root.predict(x)
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

/// Per-split feature pool: all of them, or a seeded sample of fixed size.
pub(crate) enum FeatureMode<'a> {
    All,
    Subsample { k: usize, rng: &'a mut ChaCha8Rng },
}

pub fn fit_tree(
    xs: &[Vec<f64>],
    ys: &[f64],
    task: TreeTask,
    max_depth: usize,
    min_leaf: usize,
) -> Result<TreeModel> {
    let rows: Vec<usize> = (0..xs.len()).collect();
    fit_tree_on_rows(xs, ys, &rows, task, max_depth, min_leaf, &mut FeatureMode::All)
}

pub(crate) fn fit_tree_on_rows(
    xs: &[Vec<f64>],
    ys: &[f64],
    rows: &[usize],
    task: TreeTask,
    max_depth: usize,
    min_leaf: usize,
    features: &mut FeatureMode,
) -> Result<TreeModel> {
    if rows.is_empty() || xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if xs.len() != ys.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples but {} targets",
            xs.len(),
            ys.len()
        )));
    }
    let min_leaf = min_leaf.max(1);
    let root = grow(xs, ys, rows.to_vec(), task, max_depth, min_leaf, features);
    Ok(TreeModel {
        root,
        task,
        max_depth,
    })
}

fn leaf_value(ys: &[f64], rows: &[usize], task: TreeTask) -> f64 {
    match task {
        TreeTask::Classify => {
            let vote: f64 = rows.iter().map(|&i| ys[i]).sum();
            if vote >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        TreeTask::Regress => rows.iter().map(|&i| ys[i]).sum::<f64>() / rows.len() as f64,
    }
}

/// Node impurity times row count (so parent − children is the split gain
/// without dividing through).
fn impurity_mass(ys: &[f64], rows: &[usize], task: TreeTask) -> f64 {
    let n = rows.len() as f64;
    match task {
        TreeTask::Classify => {
            let pos = rows.iter().filter(|&&i| ys[i] > 0.0).count() as f64;
            let p = pos / n;
            n * (1.0 - p * p - (1.0 - p) * (1.0 - p))
        }
        TreeTask::Regress => {
            let mean = rows.iter().map(|&i| ys[i]).sum::<f64>() / n;
            rows.iter().map(|&i| (ys[i] - mean) * (ys[i] - mean)).sum()
        }
    }
}

fn grow(
    xs: &[Vec<f64>],
    ys: &[f64],
    rows: Vec<usize>,
    task: TreeTask,
    depth_left: usize,
    min_leaf: usize,
    features: &mut FeatureMode,
) -> TreeNode {
    let parent_mass = impurity_mass(ys, &rows, task);
    if depth_left == 0 || rows.len() < 2 * min_leaf || parent_mass <= 1e-12 {
        return TreeNode::Leaf {
            value: leaf_value(ys, &rows, task),
        };
    }

    let d = xs[0].len();
    let candidate_features: Vec<usize> = match features {
        FeatureMode::All => (0..d).collect(),
        FeatureMode::Subsample { k, rng } => {
            let mut all: Vec<usize> = (0..d).collect();
            all.shuffle(rng);
            all.truncate((*k).min(d).max(1));
            // Sorted so the tie-break order stays feature-ascending no
            // matter what the shuffle produced.
            all.sort_unstable();
            all
        }
    };

    let mut best: Option<(f64, usize, f64)> = None;
    for &feature in &candidate_features {
        let mut order = rows.clone();
        order.sort_by(|&a, &b| {
            xs[a][feature]
                .partial_cmp(&xs[b][feature])
                .expect("finite feature values")
        });
        let mut pos = 0;
        while pos < order.len() {
            let v = xs[order[pos]][feature];
            let mut group_end = pos;
            while group_end < order.len() && xs[order[group_end]][feature] == v {
                group_end += 1;
            }
            if group_end == order.len() {
                break;
            }
            if group_end >= min_leaf && order.len() - group_end >= min_leaf {
                let threshold = (v + xs[order[group_end]][feature]) / 2.0;
                let gain = parent_mass
                    - impurity_mass(ys, &order[..group_end], task)
                    - impurity_mass(ys, &order[group_end..], task);
                if gain > 1e-12 && best.as_ref().map_or(true, |(g, _, _)| gain > *g + 1e-15) {
                    best = Some((gain, feature, threshold));
                }
            }
            pos = group_end;
        }
    }

    match best {
        None => TreeNode::Leaf {
            value: leaf_value(ys, &rows, task),
        },
        Some((_, feature, threshold)) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| xs[i][feature] <= threshold);
            let left = grow(xs, ys, left_rows, task, depth_left - 1, min_leaf, features);
            let right = grow(xs, ys, right_rows, task, depth_left - 1, min_leaf, features);
            TreeNode::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}
