//! Dense-matrix oracle used by integration tests.
//!
//! Builds explicit 2^n × 2^n unitaries for each gate and multiplies them
//! against basis vectors, independent of the simulator's stride-loop path,
//! so simulator output can be checked against straight linear algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use hydroq_core::qsim::Gate;

type CMat = DMatrix<Complex64>;

fn zero(n: usize) -> CMat {
    DMatrix::from_element(n, n, Complex64::new(0.0, 0.0))
}

/// Full-register matrix for a single gate, little-endian qubit order
/// (qubit 0 = least significant index bit).
pub fn gate_matrix(gate: &Gate, n_qubits: usize) -> CMat {
    let dim = 1usize << n_qubits;
    let mut m = zero(dim);
    match *gate {
        Gate::H { target } => fill_single(
            &mut m,
            target,
            [
                [
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ],
                [
                    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
                ],
            ],
        ),
        Gate::X { target } => fill_single(
            &mut m,
            target,
            [
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            ],
        ),
        Gate::Ry { target, theta } => {
            let c = Complex64::new((theta / 2.0).cos(), 0.0);
            let s = Complex64::new((theta / 2.0).sin(), 0.0);
            fill_single(&mut m, target, [[c, -s], [s, c]])
        }
        Gate::Rz { target, theta } => fill_single(
            &mut m,
            target,
            [
                [Complex64::from_polar(1.0, -theta / 2.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
            ],
        ),
        Gate::Cz { a, b } => {
            let both = (1usize << a) | (1usize << b);
            for i in 0..dim {
                let sign = if i & both == both { -1.0 } else { 1.0 };
                m[(i, i)] = Complex64::new(sign, 0.0);
            }
        }
        Gate::Cnot { control, target } => {
            let cmask = 1usize << control;
            let tmask = 1usize << target;
            for col in 0..dim {
                let row = if col & cmask != 0 { col ^ tmask } else { col };
                m[(row, col)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    m
}

fn fill_single(m: &mut CMat, target: usize, g: [[Complex64; 2]; 2]) {
    let dim = m.nrows();
    let tmask = 1usize << target;
    for col in 0..dim {
        let cb = usize::from(col & tmask != 0);
        for rb in 0..2 {
            let row = (col & !tmask) | (rb << target);
            m[(row, col)] = g[rb][cb];
        }
    }
}

/// Product of the whole gate sequence as one dense unitary.
pub fn circuit_matrix(gates: &[Gate], n_qubits: usize) -> CMat {
    let dim = 1usize << n_qubits;
    let mut acc = CMat::identity(dim, dim);
    for gate in gates {
        acc = gate_matrix(gate, n_qubits) * acc;
    }
    acc
}

/// Apply the dense circuit product to |0…0⟩.
pub fn circuit_on_zero(gates: &[Gate], n_qubits: usize) -> Vec<Complex64> {
    let m = circuit_matrix(gates, n_qubits);
    (0..m.nrows()).map(|r| m[(r, 0)]).collect()
}
