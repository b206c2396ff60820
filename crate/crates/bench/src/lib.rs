//! Workload builders for the performance benches. Inputs come from
//! closed-form sequences rather than an RNG so every run times exactly
//! the same work.

use hydroq_core::qboost::QuboProblem;
use hydroq_core::qsim::Gate;

/// n rows of d features spread over [0, π].
pub fn feature_grid(n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..d)
                .map(|j| ((i * d + j) as f64 * 0.37).sin().abs() * std::f64::consts::PI)
                .collect()
        })
        .collect()
}

/// ±1 labels split on the first feature's midpoint.
pub fn signed_labels(xs: &[Vec<f64>]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            if x[0] > std::f64::consts::FRAC_PI_2 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Dense quadratic binary problem with bounded oscillating coefficients.
pub fn qubo_instance(q: usize) -> QuboProblem {
    QuboProblem {
        q_matrix: (0..q)
            .map(|i| (0..q).map(|j| ((i * q + j) as f64 * 0.73).cos()).collect())
            .collect(),
        linear: (0..q).map(|i| (i as f64 * 1.31).sin()).collect(),
        constant: 0.25,
    }
}

/// Repeated layers of Hadamards, parameterized rotations, and an
/// entangling ring, mirroring the shape of the encoding circuits.
pub fn layered_circuit(n_qubits: usize, layers: usize) -> Vec<Gate> {
    let mut gates = Vec::new();
    for layer in 0..layers {
        for q in 0..n_qubits {
            gates.push(Gate::H { target: q });
            gates.push(Gate::Ry {
                target: q,
                theta: ((layer * n_qubits + q) as f64 * 0.61).sin(),
            });
        }
        for q in 0..n_qubits.saturating_sub(1) {
            gates.push(Gate::Cz { a: q, b: q + 1 });
        }
        if n_qubits > 2 {
            gates.push(Gate::Cnot {
                control: n_qubits - 1,
                target: 0,
            });
        }
    }
    gates
}
