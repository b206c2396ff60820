//! Autoregressive forecasting: AR(p) fit by least squares on the lag
//! matrix, forecasts by iterating one-step predictions.

use nalgebra::{DMatrix, DVector};

use crate::classical::linreg::lstsq_min_norm;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub p: usize,
    /// coefficients[j] multiplies y_{t−p+j}; the last entry is the most
    /// recent lag.
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl ArModel {
    pub fn predict_next(&self, window: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(window)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }
}

/// Least-squares fit of y_t on [y_{t−p}, …, y_{t−1}] plus intercept.
/// Degenerate lag matrices (a constant series makes every lag column
/// collinear with the intercept) resolve to the minimum-norm solution,
/// which still reproduces the series.
pub fn fit_ar(series: &[f64], p: usize) -> Result<ArModel> {
    if p == 0 {
        return Err(Error::Config("lag order must be at least 1".into()));
    }
    if series.len() < p + 2 {
        return Err(Error::InsufficientHistory {
            need: p + 2,
            got: series.len(),
        });
    }
    let rows = series.len() - p;
    let mut design = DMatrix::zeros(rows, p + 1);
    let mut target = DVector::zeros(rows);
    for r in 0..rows {
        design[(r, 0)] = 1.0;
        for j in 0..p {
            design[(r, j + 1)] = series[r + j];
        }
        target[r] = series[r + p];
    }
    let (beta, _) = lstsq_min_norm(design, target);
    Ok(ArModel {
        p,
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
    })
}

/// Iterated one-step forecast from the tail of `history`.
pub fn ar_forecast(model: &ArModel, history: &[f64], horizon: usize) -> Result<Vec<f64>> {
    if history.len() < model.p {
        return Err(Error::InsufficientHistory {
            need: model.p,
            got: history.len(),
        });
    }
    let mut window: Vec<f64> = history[history.len() - model.p..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let next = model.predict_next(&window);
        window.remove(0);
        window.push(next);
        out.push(next);
    }
    Ok(out)
}
