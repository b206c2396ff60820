//! Ordinary least squares via singular value decomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub r_squared: f64,
}

impl OlsModel {
    pub fn predict_one(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }
}

const RANK_EPS: f64 = 1e-10;

/// Minimum-norm least-squares solution of design·β ≈ target, with the
/// numerical rank as second component. Singular values below
/// RANK_EPS·σ_max are treated as zero.
pub(crate) fn lstsq_min_norm(design: DMatrix<f64>, target: DVector<f64>) -> (DVector<f64>, usize) {
    let svd = design.svd(true, true);
    let max_sv = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let cutoff = max_sv * RANK_EPS;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let solution = svd
        .solve(&target, cutoff)
        .expect("SVD was computed with singular vectors");
    (solution, rank)
}

/// Fit y ≈ intercept + X·coefficients. The design must have full column
/// rank (intercept column included) and strictly more rows than features.
/// R² is reported in-sample, with the convention R² = 0 when the target
/// has zero variance.
pub fn fit_ols(xs: &[Vec<f64>], ys: &[f64]) -> Result<OlsModel> {
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
    let n = xs.len();
    let d = xs[0].len();
    if n <= d {
        return Err(Error::Config(format!(
            "need more samples than features, got {n} samples for {d} features"
        )));
    }
    let mut design = DMatrix::zeros(n, d + 1);
    for (r, row) in xs.iter().enumerate() {
        if row.len() != d {
            return Err(Error::DimMismatch(format!(
                "row {r} has {} features, expected {d}",
                row.len()
            )));
        }
        design[(r, 0)] = 1.0;
        for (c, &v) in row.iter().enumerate() {
            design[(r, c + 1)] = v;
        }
    }
    let target = DVector::from_column_slice(ys);
    let (beta, rank) = lstsq_min_norm(design, target);
    if rank < d + 1 {
        return Err(Error::SingularDesign);
    }

    let model = OlsModel {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
        r_squared: 0.0,
    };
    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - model.predict_one(x);
            e * e
        })
        .sum();
    let r_squared = if ss_tot <= 1e-14 {
        0.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(OlsModel { r_squared, ..model })
}
