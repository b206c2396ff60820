//! Variational circuit models trained by parameter-shift gradient descent.
//!
//! One model family covers the variational classifier, the variational
//! regressor, and the lag-window autoregressive forecaster: an input
//! encoding, a hardware-efficient RY + CZ-ring ansatz, and a Z readout on
//! qubit 0. The parameter-shift rule is exact here because every trainable
//! angle appears exactly once, inside an RY gate.

use std::io::Write as IoWrite;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qkernel::{zz_feature_map, FeatureMapSpec};
use crate::qsim::{Gate, StateVector, MAX_QUBITS};

/// Trainable circuit shape: `depth` layers, each RY(θ) on every qubit
/// followed by a CZ ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "ansatz qubit count {n_qubits} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        if depth == 0 {
            return Err(Error::Config("ansatz depth must be at least 1".into()));
        }
        Ok(AnsatzSpec { n_qubits, depth })
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * self.depth
    }
}

/// Bound ansatz gates. Parameter order is layer-major: layer l, qubit q
/// reads params[l·n_qubits + q]. The CZ ring closes only for more than two
/// qubits; CZ(0,1) would otherwise repeat.
pub fn ansatz_gates(spec: &AnsatzSpec, params: &[f64]) -> Result<Vec<Gate>> {
    if params.len() != spec.n_params() {
        return Err(Error::ParamArityMismatch {
            got: params.len(),
            expected: spec.n_params(),
        });
    }
    let n = spec.n_qubits;
    let mut gates = Vec::new();
    for layer in 0..spec.depth {
        for q in 0..n {
            gates.push(Gate::Ry {
                target: q,
                theta: params[layer * n + q],
            });
        }
        for q in 0..n.saturating_sub(1) {
            gates.push(Gate::Cz { a: q, b: q + 1 });
        }
        if n > 2 {
            gates.push(Gate::Cz { a: n - 1, b: 0 });
        }
    }
    Ok(gates)
}

/// How a feature vector enters the circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoding {
    /// No input gates; the ansatz acts on |0…0⟩ directly.
    None,
    /// RY(x_q) on qubit q. Accepts any finite angle.
    AngleRy,
    /// Second-order ZZ map; features must lie in [0, π].
    ZzMap(FeatureMapSpec),
}

/// What the Z₀ expectation is turned into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// Classification: sign of ⟨Z₀⟩, exposed as a {0, 1} label.
    SignOfZ0,
    /// Regression: a·⟨Z₀⟩ + b.
    AffineZ0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    SquaredError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub loss: Loss,
    /// Progress-print cadence for front ends; training itself records every
    /// iteration.
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            max_iters: 100,
            seed: 0,
            loss: Loss::SquaredError,
            log_every: 100,
        }
    }
}

impl TrainConfig {
    fn check(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate {} must be a positive finite number",
                self.learning_rate
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Encoding circuit, ansatz, trained angles, and readout in one piece.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalModel {
    pub encoding: Encoding,
    pub ansatz: AnsatzSpec,
    pub params: Vec<f64>,
    pub readout: Readout,
    pub output_scale: f64,
    pub output_offset: f64,
}

impl VariationalModel {
    pub fn new(
        encoding: Encoding,
        ansatz: AnsatzSpec,
        params: Vec<f64>,
        readout: Readout,
    ) -> Result<Self> {
        if params.len() != ansatz.n_params() {
            return Err(Error::ParamArityMismatch {
                got: params.len(),
                expected: ansatz.n_params(),
            });
        }
        if let Encoding::ZzMap(spec) = &encoding {
            if spec.n_features != ansatz.n_qubits {
                return Err(Error::DimMismatch(format!(
                    "feature map covers {} qubits, ansatz {}",
                    spec.n_features, ansatz.n_qubits
                )));
            }
        }
        Ok(VariationalModel {
            encoding,
            ansatz,
            params,
            readout,
            output_scale: 1.0,
            output_offset: 0.0,
        })
    }

    fn encoding_gates(&self, x: &[f64]) -> Result<Vec<Gate>> {
        match &self.encoding {
            Encoding::None => {
                if !x.is_empty() {
                    return Err(Error::DimMismatch(format!(
                        "encoding takes no features, got {}",
                        x.len()
                    )));
                }
                Ok(Vec::new())
            }
            Encoding::AngleRy => {
                if x.len() != self.ansatz.n_qubits {
                    return Err(Error::DimMismatch(format!(
                        "angle encoding expects {} features, got {}",
                        self.ansatz.n_qubits,
                        x.len()
                    )));
                }
                for (index, &value) in x.iter().enumerate() {
                    if !value.is_finite() {
                        return Err(Error::FeatureScale { index, value });
                    }
                }
                Ok(x
                    .iter()
                    .enumerate()
                    .map(|(q, &v)| Gate::Ry { target: q, theta: v })
                    .collect())
            }
            Encoding::ZzMap(spec) => zz_feature_map(x, spec)?.bind(&[]),
        }
    }

    fn forward_with_params(&self, x: &[f64], params: &[f64]) -> Result<f64> {
        let enc = self.encoding_gates(x)?;
        let ans = ansatz_gates(&self.ansatz, params)?;
        let state = StateVector::zero(self.ansatz.n_qubits)?
            .apply_gates(&enc)?
            .apply_gates(&ans)?;
        state.expectation_z(0)
    }

    /// Raw readout: ⟨Z₀⟩ after encoding and ansatz, always in [−1, 1].
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.forward_with_params(x, &self.params)
    }

    /// The quantity training compares against targets: raw ⟨Z₀⟩ for the
    /// sign readout, a·⟨Z₀⟩+b for the affine readout.
    pub fn training_output(&self, x: &[f64]) -> Result<f64> {
        let raw = self.forward(x)?;
        Ok(match self.readout {
            Readout::SignOfZ0 => raw,
            Readout::AffineZ0 => self.output_scale * raw + self.output_offset,
        })
    }

    /// Classification label: 1 when ⟨Z₀⟩ > 0, else 0.
    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.forward(x)? > 0.0))
    }

    /// Regression value a·⟨Z₀⟩ + b.
    pub fn predict_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.output_scale * self.forward(x)? + self.output_offset)
    }

    fn check_batch(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<()> {
        if xs.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if xs.len() != ys.len() {
            return Err(Error::DimMismatch(format!(
                "{} samples but {} targets",
                xs.len(),
                ys.len()
            )));
        }
        Ok(())
    }

    /// Mean squared loss of the training output over a batch.
    pub fn mean_squared_loss(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
        self.check_batch(xs, ys)?;
        let mut total = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let diff = self.training_output(x)? - y;
            total += diff * diff;
        }
        Ok(total / xs.len() as f64)
    }

    /// Exact gradient of the mean squared loss via the parameter-shift
    /// rule: ∂⟨Z₀⟩/∂θⱼ = [f(θⱼ+π/2) − f(θⱼ−π/2)] / 2.
    pub fn parameter_shift_gradient(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
        self.check_batch(xs, ys)?;
        let n_params = self.params.len();
        let chain = match self.readout {
            Readout::SignOfZ0 => 1.0,
            Readout::AffineZ0 => self.output_scale,
        };
        let mut grad = vec![0.0; n_params];
        let mut shifted = self.params.clone();
        for (x, &y) in xs.iter().zip(ys) {
            let residual = self.training_output(x)? - y;
            for j in 0..n_params {
                let original = shifted[j];
                shifted[j] = original + std::f64::consts::FRAC_PI_2;
                let plus = self.forward_with_params(x, &shifted)?;
                shifted[j] = original - std::f64::consts::FRAC_PI_2;
                let minus = self.forward_with_params(x, &shifted)?;
                shifted[j] = original;
                let dz = (plus - minus) / 2.0;
                grad[j] += 2.0 * residual * chain * dz;
            }
        }
        for g in &mut grad {
            *g /= xs.len() as f64;
        }
        Ok(grad)
    }

    /// Closed-form least-squares fit of (scale, offset) mapping raw ⟨Z₀⟩
    /// outputs to targets. Degenerate raw spread keeps scale at 0 and fits
    /// the mean.
    fn refit_affine(&mut self, xs: &[Vec<f64>], ys: &[f64]) -> Result<()> {
        let n = xs.len() as f64;
        let mut raws = Vec::with_capacity(xs.len());
        for x in xs {
            raws.push(self.forward(x)?);
        }
        let mean_r = raws.iter().sum::<f64>() / n;
        let mean_y = ys.iter().sum::<f64>() / n;
        let var_r: f64 = raws.iter().map(|r| (r - mean_r) * (r - mean_r)).sum();
        if var_r <= 1e-14 {
            self.output_scale = 0.0;
            self.output_offset = mean_y;
            return Ok(());
        }
        let cov: f64 = raws
            .iter()
            .zip(ys)
            .map(|(r, &y)| (r - mean_r) * (y - mean_y))
            .sum();
        self.output_scale = cov / var_r;
        self.output_offset = mean_y - self.output_scale * mean_r;
        Ok(())
    }
}

/// Full-batch gradient descent from a fresh seeded initialization
/// (uniform in [−π/100, π/100]; the incoming model's params are not
/// reused). Returns the trained model and the pre-update loss at every
/// iteration. For the affine readout, (scale, offset) are refit by least
/// squares every 100 iterations and once more after the final step.
pub fn train_variational(
    model: &VariationalModel,
    xs: &[Vec<f64>],
    ys: &[f64],
    cfg: &TrainConfig,
) -> Result<(VariationalModel, Vec<f64>)> {
    cfg.check()?;
    model.check_batch(xs, ys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let span = std::f64::consts::PI / 100.0;
    let mut trained = model.clone();
    trained.params = (0..model.ansatz.n_params())
        .map(|_| rng.gen_range(-span..span))
        .collect();

    let mut cost_history = Vec::with_capacity(cfg.max_iters);
    for iter in 0..cfg.max_iters {
        if trained.readout == Readout::AffineZ0 && iter > 0 && iter % 100 == 0 {
            trained.refit_affine(xs, ys)?;
        }
        let Loss::SquaredError = cfg.loss;
        let loss = trained.mean_squared_loss(xs, ys)?;
        if !loss.is_finite() {
            return Err(Error::Divergence { iter });
        }
        cost_history.push(loss);
        let grad = trained.parameter_shift_gradient(xs, ys)?;
        for (p, g) in trained.params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
    }
    if trained.readout == Readout::AffineZ0 {
        trained.refit_affine(xs, ys)?;
    }
    Ok((trained, cost_history))
}

/// Batch classification labels.
pub fn vqc_predict(model: &VariationalModel, xs: &[Vec<f64>]) -> Result<Vec<u8>> {
    xs.iter().map(|x| model.predict_label(x)).collect()
}

/// Batch regression values.
pub fn vqc_predict_values(model: &VariationalModel, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    xs.iter().map(|x| model.predict_value(x)).collect()
}

/// Iterated one-step-ahead forecast: each prediction joins the lag window
/// for the next step. The series must already be in the model's feature
/// scale; callers un-scale afterwards.
pub fn qar_forecast(
    model: &VariationalModel,
    series: &[f64],
    lags: usize,
    horizon: usize,
) -> Result<Vec<f64>> {
    if lags == 0 {
        return Err(Error::Config("lag count must be at least 1".into()));
    }
    if series.len() < lags {
        return Err(Error::InsufficientHistory {
            need: lags,
            got: series.len(),
        });
    }
    let mut window: Vec<f64> = series[series.len() - lags..].to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let pred = model.predict_value(&window)?;
        window.remove(0);
        window.push(pred);
        out.push(pred);
    }
    Ok(out)
}

/// Two-column CSV of the training cost curve.
pub fn write_cost_history_csv<W: IoWrite>(history: &[f64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "iter,cost")?;
    for (i, c) in history.iter().enumerate() {
        writeln!(out, "{i},{c}")?;
    }
    Ok(())
}
