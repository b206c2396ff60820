//! Support vector machine trained by sequential minimal optimization with
//! max-violating-pair working-set selection.
//!
//! The same solver core runs for native kernels (RBF, linear) and for
//! caller-supplied Gram matrices; the precomputed path exists so a quantum
//! kernel matrix can drive an otherwise unchanged SVM. Both paths share
//! one arithmetic sequence, so identical Gram input yields identical
//! models.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvmKernel {
    Rbf { gamma: f64 },
    Linear,
    /// Kernel values supplied by the caller; the model stores no vectors.
    Precomputed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: SvmKernel,
    pub c: f64,
    /// One multiplier per training sample, zero for non-support vectors.
    pub alphas: Vec<f64>,
    pub bias: f64,
    /// Training rows, empty in precomputed mode.
    pub train_x: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

/// The sklearn-style "scale" default: 1 / (d · pooled feature variance),
/// falling back to 1/d for constant features.
pub fn rbf_gamma_default(xs: &[Vec<f64>]) -> f64 {
    let d = xs.first().map_or(1, Vec::len).max(1);
    let all: Vec<f64> = xs.iter().flatten().copied().collect();
    if all.is_empty() {
        return 1.0 / d as f64;
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / all.len() as f64;
    if var <= 1e-12 {
        1.0 / d as f64
    } else {
        1.0 / (d as f64 * var)
    }
}

fn kernel_value(kernel: &SvmKernel, a: &[f64], b: &[f64]) -> f64 {
    match kernel {
        SvmKernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        SvmKernel::Rbf { gamma } => {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-gamma * d2).exp()
        }
        SvmKernel::Precomputed => unreachable!("precomputed kernels carry no evaluator"),
    }
}

fn check_labels(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    for &v in y {
        if v != 1.0 && v != -1.0 {
            return Err(Error::Config(format!("labels must be ±1, found {v}")));
        }
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateLabels);
    }
    Ok(())
}

/// SMO with WSS1: repeatedly pick the maximal-violating pair
/// (i maximizing −yᵢGᵢ over the up-set, j minimizing it over the down-set)
/// and solve the two-variable subproblem analytically. Terminates when the
/// duality gap proxy m(α) − M(α) drops to tol.
fn solve_smo(gram: &[Vec<f64>], y: &[f64], c: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let mut alpha = vec![0.0f64; n];
    // G_i = ∂f/∂α_i of the dual objective; all −1 at α = 0.
    let mut grad = vec![-1.0f64; n];
    let max_pair_steps = 200_000usize.max(100 * n);

    for _ in 0..max_pair_steps {
        // up-set: α_i can grow in the +y_i direction.
        let mut i_best: Option<(f64, usize)> = None;
        let mut j_best: Option<(f64, usize)> = None;
        for t in 0..n {
            let score = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] < 0.0 && alpha[t] < c) || (y[t] > 0.0 && alpha[t] > 0.0);
            if in_up && i_best.map_or(true, |(s, _)| score > s) {
                i_best = Some((score, t));
            }
            if in_low && j_best.map_or(true, |(s, _)| score < s) {
                j_best = Some((score, t));
            }
        }
        let (m, i) = match i_best {
            Some(v) => v,
            None => break,
        };
        let (m_low, j) = match j_best {
            Some(v) => v,
            None => break,
        };
        if m - m_low <= tol {
            break;
        }

        let eta = (gram[i][i] + gram[j][j] - 2.0 * gram[i][j]).max(1e-12);
        // Step along the feasible direction (Δα_i = y_i·t, Δα_j = −y_j·t).
        let mut step = (m - m_low) / eta;
        let room_i = if y[i] > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if y[j] > 0.0 { alpha[j] } else { c - alpha[j] };
        step = step.min(room_i).min(room_j);

        alpha[i] = (alpha[i] + y[i] * step).clamp(0.0, c);
        alpha[j] = (alpha[j] - y[j] * step).clamp(0.0, c);
        for t in 0..n {
            grad[t] += y[t] * step * (gram[t][i] - gram[t][j]);
        }
    }

    // Bias from free support vectors; with none, the midpoint of the final
    // violation interval.
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..n {
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += -y[t] * grad[t];
            free_count += 1;
        }
    }
    let bias = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        let mut m = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let score = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] < 0.0 && alpha[t] < c) || (y[t] > 0.0 && alpha[t] > 0.0);
            if in_up {
                m = m.max(score);
            }
            if in_low {
                m_low = m_low.min(score);
            }
        }
        (m + m_low) / 2.0
    };
    Ok((alpha, bias))
}

fn check_params(c: f64, tol: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("C = {c} must be positive and finite")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tol = {tol} must be positive and finite")));
    }
    Ok(())
}

/// Train with a native kernel; the Gram matrix is materialized once.
pub fn train_svm(
    xs: &[Vec<f64>],
    y: &[f64],
    kernel: SvmKernel,
    c: f64,
    tol: f64,
) -> Result<SvmModel> {
    check_params(c, tol)?;
    if matches!(kernel, SvmKernel::Precomputed) {
        return Err(Error::Config(
            "use train_svm_precomputed for caller-supplied Gram matrices".into(),
        ));
    }
    if xs.len() != y.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples but {} labels",
            xs.len(),
            y.len()
        )));
    }
    check_labels(y)?;
    let n = xs.len();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = kernel_value(&kernel, &xs[i], &xs[j]);
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    let (alphas, bias) = solve_smo(&gram, y, c, tol)?;
    Ok(SvmModel {
        kernel,
        c,
        alphas,
        bias,
        train_x: xs.to_vec(),
        labels: y.to_vec(),
    })
}

/// Train on a caller-supplied Gram matrix (row i, column j = k(xᵢ, xⱼ)).
/// The matrix must be symmetric and PSD down to −1e-6.
pub fn train_svm_precomputed(gram: &[Vec<f64>], y: &[f64], c: f64, tol: f64) -> Result<SvmModel> {
    check_params(c, tol)?;
    let n = gram.len();
    if n == 0 || gram.iter().any(|row| row.len() != n) {
        return Err(Error::Kernel("Gram matrix must be square and non-empty".into()));
    }
    if n != y.len() {
        return Err(Error::DimMismatch(format!(
            "{n}x{n} Gram matrix but {} labels",
            y.len()
        )));
    }
    check_labels(y)?;
    for i in 0..n {
        for j in (i + 1)..n {
            if (gram[i][j] - gram[j][i]).abs() > 1e-8 {
                return Err(Error::Kernel(format!(
                    "Gram asymmetry at ({i},{j}): {} vs {}",
                    gram[i][j], gram[j][i]
                )));
            }
        }
    }
    let flat: Vec<f64> = gram.iter().flatten().copied().collect();
    let min_eig = DMatrix::from_row_slice(n, n, &flat)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -1e-6 {
        return Err(Error::Kernel(format!(
            "Gram matrix is not positive semidefinite: min eigenvalue {min_eig}"
        )));
    }
    let (alphas, bias) = solve_smo(gram, y, c, tol)?;
    Ok(SvmModel {
        kernel: SvmKernel::Precomputed,
        c,
        alphas,
        bias,
        train_x: Vec::new(),
        labels: y.to_vec(),
    })
}

impl SvmModel {
    /// Decision value Σ αᵢyᵢk(xᵢ, x) + bias for a native-kernel model.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if matches!(self.kernel, SvmKernel::Precomputed) {
            return Err(Error::Config(
                "precomputed-kernel models need decision_from_kernel_row".into(),
            ));
        }
        if let Some(first) = self.train_x.first() {
            if x.len() != first.len() {
                return Err(Error::DimMismatch(format!(
                    "query has {} features, training data {}",
                    x.len(),
                    first.len()
                )));
            }
        }
        let mut sum = 0.0;
        for i in 0..self.alphas.len() {
            sum += self.alphas[i] * self.labels[i] * kernel_value(&self.kernel, &self.train_x[i], x);
        }
        Ok(sum + self.bias)
    }

    /// Decision value from a precomputed row [k(x₀, x), …, k(x_{N−1}, x)].
    /// Also valid for native models when the caller already has the row;
    /// both paths sum in training-index order.
    pub fn decision_from_kernel_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.alphas.len() {
            return Err(Error::DimMismatch(format!(
                "kernel row has {} entries, model has {} training samples",
                row.len(),
                self.alphas.len()
            )));
        }
        let mut sum = 0.0;
        for i in 0..self.alphas.len() {
            sum += self.alphas[i] * self.labels[i] * row[i];
        }
        Ok(sum + self.bias)
    }

    /// {0, 1} label plus the raw decision value. Positive decisions map to
    /// 1.
    pub fn predict_one(&self, x: &[f64]) -> Result<(u8, f64)> {
        let d = self.decision(x)?;
        Ok((u8::from(d > 0.0), d))
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<u8>> {
        xs.iter().map(|x| self.predict_one(x).map(|(l, _)| l)).collect()
    }

    pub fn predict_from_kernel_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>> {
        rows.iter()
            .map(|r| self.decision_from_kernel_row(r).map(|d| u8::from(d > 0.0)))
            .collect()
    }

    /// Largest KKT violation m(α) − M(α), recomputed from scratch. At most
    /// tol after successful training.
    pub fn kkt_violation(&self, gram: &[Vec<f64>]) -> f64 {
        let n = self.labels.len();
        let mut m = f64::NEG_INFINITY;
        let mut m_low = f64::INFINITY;
        for t in 0..n {
            let mut g = -1.0;
            for j in 0..n {
                g += self.labels[t] * self.labels[j] * self.alphas[j] * gram[t][j];
            }
            let score = -self.labels[t] * g;
            let in_up = (self.labels[t] > 0.0 && self.alphas[t] < self.c)
                || (self.labels[t] < 0.0 && self.alphas[t] > 0.0);
            let in_low = (self.labels[t] < 0.0 && self.alphas[t] < self.c)
                || (self.labels[t] > 0.0 && self.alphas[t] > 0.0);
            if in_up {
                m = m.max(score);
            }
            if in_low {
                m_low = m_low.min(score);
            }
        }
        m - m_low
    }
}
