//! Decision stumps: one-feature threshold rules with a polarity bit.
//!
//! Shared weak learner for AdaBoost and the QUBO ensemble pool. A stump
//! votes −polarity on x[feature] ≤ threshold and +polarity otherwise.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// +1 or −1; −1 swaps the two sides.
    pub polarity: i8,
}

impl Stump {
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let raw = if x[self.feature] <= self.threshold {
            -1.0
        } else {
            1.0
        };
        f64::from(self.polarity) * raw
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

/// Weighted-error stump fit. Scans every feature's midpoint thresholds and
/// both polarities; ties keep the earliest candidate in (feature ascending,
/// threshold ascending, polarity +1 first) order. A dataset with no split
/// candidate at all (every feature constant) degrades to a constant vote
/// matching the weighted label majority.
pub fn fit_stump(xs: &[Vec<f64>], ys: &[f64], weights: &[f64]) -> Result<Stump> {
    if xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if xs.len() != ys.len() || xs.len() != weights.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples, {} labels, {} weights",
            xs.len(),
            ys.len(),
            weights.len()
        )));
    }
    let d = xs[0].len();
    let total_w: f64 = weights.iter().sum();

    let mut best: Option<(f64, Stump)> = None;
    let mut consider = |err: f64, stump: Stump| {
        if best.as_ref().map_or(true, |(e, _)| err < *e - 1e-15) {
            best = Some((err, stump));
        }
    };

    for feature in 0..d {
        // Sort sample indices by this feature once; sweeping the threshold
        // left-to-right then updates the weighted error incrementally.
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| {
            xs[a][feature]
                .partial_cmp(&xs[b][feature])
                .expect("finite feature values")
        });

        // err_plus = weighted error of the polarity=+1 stump. With the
        // threshold below every value, all samples sit on the +1 side.
        let mut err_plus: f64 = order
            .iter()
            .filter(|&&i| ys[i] < 0.0)
            .map(|&i| weights[i])
            .sum();

        let mut pos = 0;
        while pos < order.len() {
            let v = xs[order[pos]][feature];
            // Move the whole group of equal values to the −1 side.
            let mut group_end = pos;
            while group_end < order.len() && xs[order[group_end]][feature] == v {
                let i = order[group_end];
                if ys[i] > 0.0 {
                    err_plus += weights[i];
                } else {
                    err_plus -= weights[i];
                }
                group_end += 1;
            }
            if group_end == order.len() {
                break;
            }
            let threshold = (v + xs[order[group_end]][feature]) / 2.0;
            consider(
                err_plus,
                Stump {
                    feature,
                    threshold,
                    polarity: 1,
                },
            );
            consider(
                total_w - err_plus,
                Stump {
                    feature,
                    threshold,
                    polarity: -1,
                },
            );
            pos = group_end;
        }
    }

    match best {
        Some((_, stump)) => Ok(stump),
        None => {
            // Every feature constant: vote the weighted majority everywhere.
            let signed: f64 = ys.iter().zip(weights).map(|(&y, &w)| y * w).sum();
            let value = if d == 0 { 0.0 } else { xs[0][0] };
            Ok(Stump {
                feature: 0,
                threshold: value,
                polarity: if signed > 0.0 { -1 } else { 1 },
            })
        }
    }
}

/// Weighted misclassification rate of a stump, normalized by total weight.
pub fn weighted_error(stump: &Stump, xs: &[Vec<f64>], ys: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let wrong: f64 = xs
        .iter()
        .zip(ys)
        .zip(weights)
        .filter(|((x, &y), _)| stump.predict_one(x) != y)
        .map(|(_, &w)| w)
        .sum();
    wrong / total
}
