//! Gradient and forward-pass checks against independent oracles: central
//! finite differences of the loss, and dense matrix products for the
//! circuit itself.

mod common;

use approx::assert_abs_diff_eq;
use common::circuit_on_zero;
use hydroq_core::qkernel::{Entanglement, FeatureMapSpec};
use hydroq_core::qsim::Gate;
use hydroq_core::vqml::{
    ansatz_gates, train_variational, AnsatzSpec, Encoding, Loss, Readout, TrainConfig,
    VariationalModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Central finite difference of the mean squared loss, h = 1e-5.
fn fd_gradient(model: &VariationalModel, xs: &[Vec<f64>], ys: &[f64]) -> Vec<f64> {
    let h = 1e-5;
    let mut grad = Vec::with_capacity(model.params.len());
    for j in 0..model.params.len() {
        let mut plus = model.clone();
        plus.params[j] += h;
        let mut minus = model.clone();
        minus.params[j] -= h;
        let lp = plus.mean_squared_loss(xs, ys).unwrap();
        let lm = minus.mean_squared_loss(xs, ys).unwrap();
        grad.push((lp - lm) / (2.0 * h));
    }
    grad
}

#[test]
fn one_param_gradient_matches_finite_difference() {
    let model = VariationalModel::new(
        Encoding::AngleRy,
        AnsatzSpec::new(1, 1).unwrap(),
        vec![0.83],
        Readout::SignOfZ0,
    )
    .unwrap();
    let xs = vec![vec![0.3], vec![1.9], vec![2.6]];
    let ys = vec![1.0, -1.0, 0.5];
    let analytic = model.parameter_shift_gradient(&xs, &ys).unwrap();
    let numeric = fd_gradient(&model, &xs, &ys);
    assert_abs_diff_eq!(analytic[0], numeric[0], epsilon = 1e-6);
}

#[test]
fn four_qubit_depth_two_gradient_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let ansatz = AnsatzSpec::new(4, 2).unwrap();
    let params: Vec<f64> = (0..ansatz.n_params())
        .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    let model = VariationalModel::new(
        Encoding::ZzMap(FeatureMapSpec::new(4, 1, Entanglement::Linear).unwrap()),
        ansatz,
        params,
        Readout::SignOfZ0,
    )
    .unwrap();
    let xs: Vec<Vec<f64>> = (0..8)
        .map(|_| (0..4).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect())
        .collect();
    let ys: Vec<f64> = (0..8).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    let analytic = model.parameter_shift_gradient(&xs, &ys).unwrap();
    let numeric = fd_gradient(&model, &xs, &ys);
    let max_err = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0f64, f64::max);
    assert!(max_err < 1e-5, "max gradient error {max_err}");
}

#[test]
fn affine_readout_gradient_matches_finite_difference() {
    let mut model = VariationalModel::new(
        Encoding::AngleRy,
        AnsatzSpec::new(2, 2).unwrap(),
        vec![0.2, -0.5, 1.1, 0.4],
        Readout::AffineZ0,
    )
    .unwrap();
    model.output_scale = 1.7;
    model.output_offset = -0.3;
    let xs = vec![vec![0.1, 0.5], vec![1.2, 2.2], vec![0.8, 0.8], vec![2.5, 0.3]];
    let ys = vec![0.4, -0.2, 0.9, 0.0];
    let analytic = model.parameter_shift_gradient(&xs, &ys).unwrap();
    let numeric = fd_gradient(&model, &xs, &ys);
    for (a, n) in analytic.iter().zip(&numeric) {
        assert_abs_diff_eq!(a, n, epsilon = 1e-6);
    }
}

#[test]
fn random_two_qubit_forward_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let ansatz = AnsatzSpec::new(2, 2).unwrap();
        let params: Vec<f64> = (0..ansatz.n_params())
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let spec = FeatureMapSpec::new(2, 1, Entanglement::Linear).unwrap();
        let model = VariationalModel::new(
            Encoding::ZzMap(spec),
            ansatz,
            params.clone(),
            Readout::SignOfZ0,
        )
        .unwrap();
        let x: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();

        // Same gate list, pushed through the dense product instead of the
        // simulator, then ⟨Z₀⟩ by direct summation.
        let mut gates: Vec<Gate> =
            hydroq_core::qkernel::zz_feature_map(&x, &model_spec(&model)).unwrap().bind(&[]).unwrap();
        gates.extend(ansatz_gates(&model.ansatz, &params).unwrap());
        let amps = circuit_on_zero(&gates, 2);
        let expected: f64 = amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum();

        let got = model.forward(&x).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-10);
    }
}

fn model_spec(model: &VariationalModel) -> FeatureMapSpec {
    match &model.encoding {
        Encoding::ZzMap(s) => *s,
        _ => unreachable!(),
    }
}

#[test]
fn cosine_toy_regression_reaches_low_error() {
    // ⟨Z⟩ of RY(x)|0⟩ is cos(x), so a 1-qubit angle-encoded model can
    // represent the target exactly.
    let model = VariationalModel::new(
        Encoding::AngleRy,
        AnsatzSpec::new(1, 1).unwrap(),
        vec![0.0],
        Readout::AffineZ0,
    )
    .unwrap();
    let xs: Vec<Vec<f64>> = (0..24)
        .map(|i| vec![i as f64 * std::f64::consts::TAU / 24.0])
        .collect();
    let ys: Vec<f64> = xs.iter().map(|x| x[0].cos()).collect();
    let cfg = TrainConfig {
        learning_rate: 0.1,
        max_iters: 500,
        seed: 12,
        loss: Loss::SquaredError,
        log_every: 100,
    };
    let (trained, history) = train_variational(&model, &xs, &ys, &cfg).unwrap();
    assert_eq!(history.len(), 500);
    let mse = trained.mean_squared_loss(&xs, &ys).unwrap();
    assert!(mse < 0.05, "final mse {mse}");
    assert!(history.iter().all(|c| c.is_finite()));
}

#[test]
fn small_learning_rate_cost_non_increasing() {
    let model = VariationalModel::new(
        Encoding::AngleRy,
        AnsatzSpec::new(1, 1).unwrap(),
        vec![0.0],
        Readout::AffineZ0,
    )
    .unwrap();
    let xs: Vec<Vec<f64>> = (0..16)
        .map(|i| vec![i as f64 * std::f64::consts::TAU / 16.0])
        .collect();
    let ys: Vec<f64> = xs.iter().map(|x| x[0].cos()).collect();
    let cfg = TrainConfig {
        learning_rate: 0.01,
        max_iters: 200,
        seed: 4,
        loss: Loss::SquaredError,
        log_every: 100,
    };
    let (_, history) = train_variational(&model, &xs, &ys, &cfg).unwrap();
    for window in history.windows(50) {
        assert!(
            window.last().unwrap() <= &(window[0] + 1e-9),
            "cost rose across a 50-iteration window"
        );
    }
}

#[test]
fn constant_series_forecast_plateaus() {
    // A window of identical values trained against the same constant must
    // forecast that constant forward.
    let c = 0.6;
    let lags = 3;
    let model = VariationalModel::new(
        Encoding::AngleRy,
        AnsatzSpec::new(lags, 1).unwrap(),
        vec![0.0; lags],
        Readout::AffineZ0,
    )
    .unwrap();
    let series = vec![c; 40];
    let xs: Vec<Vec<f64>> = (lags..series.len())
        .map(|t| series[t - lags..t].to_vec())
        .collect();
    let ys: Vec<f64> = (lags..series.len()).map(|t| series[t]).collect();
    let cfg = TrainConfig {
        learning_rate: 0.1,
        max_iters: 30,
        seed: 9,
        loss: Loss::SquaredError,
        log_every: 100,
    };
    let (trained, _) = train_variational(&model, &xs, &ys, &cfg).unwrap();
    let forecast = hydroq_core::vqml::qar_forecast(&trained, &series, lags, 5).unwrap();
    assert_eq!(forecast.len(), 5);
    for v in forecast {
        assert!((v - c).abs() < 0.05, "forecast {v} drifted from {c}");
    }
}
