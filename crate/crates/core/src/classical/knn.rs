//! k-nearest-neighbour prediction under the Euclidean metric.
//!
//! Distance ties resolve to the lower training index; classification vote
//! ties resolve to +1. Both rules are fixed so results never depend on
//! sort internals.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnnTask {
    Classify,
    Regress,
}

pub fn knn_predict(
    train_x: &[Vec<f64>],
    train_y: &[f64],
    x: &[f64],
    k: usize,
    task: KnnTask,
) -> Result<f64> {
    if train_x.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if train_x.len() != train_y.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples but {} targets",
            train_x.len(),
            train_y.len()
        )));
    }
    if k == 0 || k > train_x.len() {
        return Err(Error::Config(format!(
            "k = {k} outside valid range 1..={}",
            train_x.len()
        )));
    }

    let mut ranked: Vec<(f64, usize)> = train_x
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let d2: f64 = row
                .iter()
                .zip(x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d2, i)
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite distances")
            .then(a.1.cmp(&b.1))
    });

    let neighbours = &ranked[..k];
    Ok(match task {
        KnnTask::Classify => {
            let vote: f64 = neighbours.iter().map(|&(_, i)| train_y[i]).sum();
            if vote >= 0.0 {
                1.0
            } else {
                -1.0
            }
        }
        KnnTask::Regress => {
            neighbours.iter().map(|&(_, i)| train_y[i]).sum::<f64>() / k as f64
        }
    })
}

pub fn knn_predict_batch(
    train_x: &[Vec<f64>],
    train_y: &[f64],
    xs: &[Vec<f64>],
    k: usize,
    task: KnnTask,
) -> Result<Vec<f64>> {
    xs.iter()
        .map(|x| knn_predict(train_x, train_y, x, k, task))
        .collect()
}
