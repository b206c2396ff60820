//! Dense statevector simulator.
//!
//! Holds the full 2^n amplitude vector for an n-qubit register and applies
//! gates from the fixed set {H, X, RY, RZ, CZ, CNOT}. Qubit ordering is
//! little-endian: qubit 0 is the least significant bit of the amplitude
//! index, so |q1 q0⟩ = |01⟩ lives at index 1 for q0 = 1, q1 = 0.
//!
//! States are immutable from the caller's perspective: every operation
//! returns a new `StateVector`. Exact expectations only, no shot sampling.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on register width. Every model in the toolkit fits in 8 qubits;
/// the cap keeps an errant config from allocating 2^30 amplitudes.
pub const MAX_QUBITS: usize = 12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A gate instance with bound angles and target qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H { target: usize },
    X { target: usize },
    Ry { target: usize, theta: f64 },
    Rz { target: usize, theta: f64 },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// The inverse gate. H, X, CZ and CNOT are involutions; rotations negate
    /// their angle.
    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Ry { target, theta } => Gate::Ry { target, theta: -theta },
            Gate::Rz { target, theta } => Gate::Rz { target, theta: -theta },
            g => g,
        }
    }

    /// Qubit indices the gate touches.
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::H { target } | Gate::X { target } => vec![target],
            Gate::Ry { target, .. } | Gate::Rz { target, .. } => vec![target],
            Gate::Cz { a, b } => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let targets = self.targets();
        for &t in &targets {
            if t >= n_qubits {
                return Err(Error::InvalidQubit {
                    index: t,
                    n_qubits,
                });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidQubit {
                index: targets[1],
                n_qubits,
            });
        }
        Ok(())
    }
}

/// Complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0…0⟩.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count {n_qubits} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes. Length must be a power of two and
    /// the vector must be normalized within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > (1 << MAX_QUBITS) {
            return Err(Error::Config(format!(
                "amplitude vector length {len} is not a supported power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!(
                "amplitude vector norm {norm} is not 1"
            )));
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Σ|a|², which any sequence of gate applications must keep at 1.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply one gate, returning the transformed state.
    pub fn apply_gate(&self, gate: &Gate) -> Result<StateVector> {
        gate.validate(self.n_qubits)?;
        let mut out = self.clone();
        out.apply_gate_unchecked(gate);
        Ok(out)
    }

    /// Apply a gate sequence in order.
    pub fn apply_gates(&self, gates: &[Gate]) -> Result<StateVector> {
        for gate in gates {
            gate.validate(self.n_qubits)?;
        }
        let mut out = self.clone();
        for gate in gates {
            out.apply_gate_unchecked(gate);
        }
        Ok(out)
    }

    /// |a_i|² for every basis index, in index order. Sums to 1 within 1e-10.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Pauli-Z expectation on one qubit: Σ_i (±1)·|a_i|², +1 where the
    /// qubit's bit is 0.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidQubit {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        let mask = 1usize << qubit;
        let mut total = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let sign = if i & mask == 0 { 1.0 } else { -1.0 };
            total += sign * a.norm_sqr();
        }
        Ok(total)
    }

    fn apply_gate_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::H { target } => self.apply_single(
                target,
                [
                    [
                        Complex64::new(FRAC_1_SQRT_2, 0.0),
                        Complex64::new(FRAC_1_SQRT_2, 0.0),
                    ],
                    [
                        Complex64::new(FRAC_1_SQRT_2, 0.0),
                        Complex64::new(-FRAC_1_SQRT_2, 0.0),
                    ],
                ],
            ),
            Gate::X { target } => {
                let mask = 1usize << target;
                for i in 0..self.amplitudes.len() {
                    if i & mask == 0 {
                        self.amplitudes.swap(i, i | mask);
                    }
                }
            }
            Gate::Ry { target, theta } => {
                let c = (theta / 2.0).cos();
                let s = (theta / 2.0).sin();
                self.apply_single(
                    target,
                    [
                        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
                    ],
                )
            }
            Gate::Rz { target, theta } => {
                let half = theta / 2.0;
                self.apply_single(
                    target,
                    [
                        [Complex64::from_polar(1.0, -half), Complex64::new(0.0, 0.0)],
                        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, half)],
                    ],
                )
            }
            Gate::Cz { a, b } => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for i in 0..self.amplitudes.len() {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
        }
    }

    fn apply_single(&mut self, target: usize, m: [[Complex64; 2]; 2]) {
        let step = 1usize << target;
        let len = self.amplitudes.len();
        let mut base = 0;
        while base < len {
            for i in base..base + step {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + step];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i + step] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += step << 1;
        }
    }
}

/// Inverse of a gate sequence: reversed order, each gate inverted.
pub fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// How a rotation angle is supplied when a circuit runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binding {
    Fixed(f64),
    Param(usize),
}

/// One gate slot in a parameterized circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitOp {
    H { target: usize },
    X { target: usize },
    Ry { target: usize, angle: Binding },
    Rz { target: usize, angle: Binding },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
}

/// Ordered gate list over `n_qubits` qubits with `n_params` free rotation
/// angles. Binding a full parameter vector yields a plain `Gate` sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
    n_params: usize,
}

impl ParamCircuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "qubit count {n_qubits} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        Ok(ParamCircuit {
            n_qubits,
            ops: Vec::new(),
            n_params: 0,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn push_h(&mut self, target: usize) -> Result<&mut Self> {
        self.push_validated(CircuitOp::H { target })
    }

    pub fn push_x(&mut self, target: usize) -> Result<&mut Self> {
        self.push_validated(CircuitOp::X { target })
    }

    pub fn push_ry(&mut self, target: usize, angle: Binding) -> Result<&mut Self> {
        self.push_validated(CircuitOp::Ry { target, angle })
    }

    pub fn push_rz(&mut self, target: usize, angle: Binding) -> Result<&mut Self> {
        self.push_validated(CircuitOp::Rz { target, angle })
    }

    pub fn push_cz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push_validated(CircuitOp::Cz { a, b })
    }

    pub fn push_cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push_validated(CircuitOp::Cnot { control, target })
    }

    fn push_validated(&mut self, op: CircuitOp) -> Result<&mut Self> {
        let targets: &[usize] = match op {
            CircuitOp::H { target } | CircuitOp::X { target } => &[target],
            CircuitOp::Ry { target, .. } | CircuitOp::Rz { target, .. } => &[target],
            CircuitOp::Cz { a, b } => &[a, b],
            CircuitOp::Cnot { control, target } => &[control, target],
        };
        for &t in targets {
            if t >= self.n_qubits {
                return Err(Error::InvalidQubit {
                    index: t,
                    n_qubits: self.n_qubits,
                });
            }
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidQubit {
                index: targets[1],
                n_qubits: self.n_qubits,
            });
        }
        if let CircuitOp::Ry {
            angle: Binding::Param(p),
            ..
        }
        | CircuitOp::Rz {
            angle: Binding::Param(p),
            ..
        } = op
        {
            self.n_params = self.n_params.max(p + 1);
        }
        self.ops.push(op);
        Ok(self)
    }

    /// Bind a full parameter vector, producing a concrete gate sequence.
    pub fn bind(&self, params: &[f64]) -> Result<Vec<Gate>> {
        if params.len() != self.n_params {
            return Err(Error::ParamArityMismatch {
                got: params.len(),
                expected: self.n_params,
            });
        }
        Ok(self
            .ops
            .iter()
            .map(|op| op_as_gate(op, params).expect("full parameter vector binds every op"))
            .collect())
    }

    /// Run the bound circuit from |0…0⟩.
    pub fn run(&self, params: &[f64]) -> Result<StateVector> {
        let gates = self.bind(params)?;
        StateVector::zero(self.n_qubits)?.apply_gates(&gates)
    }
}

fn op_as_gate(op: &CircuitOp, params: &[f64]) -> Option<Gate> {
    let resolve = |binding: &Binding| match *binding {
        Binding::Fixed(v) => Some(v),
        Binding::Param(i) => params.get(i).copied(),
    };
    Some(match *op {
        CircuitOp::H { target } => Gate::H { target },
        CircuitOp::X { target } => Gate::X { target },
        CircuitOp::Ry { target, ref angle } => Gate::Ry {
            target,
            theta: resolve(angle)?,
        },
        CircuitOp::Rz { target, ref angle } => Gate::Rz {
            target,
            theta: resolve(angle)?,
        },
        CircuitOp::Cz { a, b } => Gate::Cz { a, b },
        CircuitOp::Cnot { control, target } => Gate::Cnot { control, target },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn hadamard_on_zero() {
        let state = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::H { target: 0 })
            .unwrap();
        assert_abs_diff_eq!(state.amplitudes()[0].re, FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn x_flips_zero_to_one() {
        let state = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::X { target: 0 })
            .unwrap();
        assert_eq!(state.amplitudes()[0], re(0.0));
        assert_eq!(state.amplitudes()[1], re(1.0));
    }

    #[test]
    fn cnot_builds_bell_state() {
        // H on qubit 0 puts weight on indices 0 and 1; CNOT(0,1) moves
        // index 1 to index 3.
        let state = StateVector::zero(2)
            .unwrap()
            .apply_gates(&[
                Gate::H { target: 0 },
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ])
            .unwrap();
        let probs = state.probabilities();
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[3], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn probabilities_of_basis_and_plus_states() {
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(zero.probabilities(), vec![1.0, 0.0]);
        let plus = zero.apply_gate(&Gate::H { target: 0 }).unwrap();
        let probs = plus.probabilities();
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_z_on_basis_and_plus_states() {
        let zero = StateVector::zero(1).unwrap();
        assert_abs_diff_eq!(zero.expectation_z(0).unwrap(), 1.0, epsilon = 1e-12);
        let one = zero.apply_gate(&Gate::X { target: 0 }).unwrap();
        assert_abs_diff_eq!(one.expectation_z(0).unwrap(), -1.0, epsilon = 1e-12);
        let plus = zero.apply_gate(&Gate::H { target: 0 }).unwrap();
        assert_abs_diff_eq!(plus.expectation_z(0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_qubit_rejected() {
        let state = StateVector::zero(2).unwrap();
        let err = state.apply_gate(&Gate::H { target: 2 }).unwrap_err();
        assert!(matches!(err, Error::InvalidQubit { index: 2, .. }));
        assert!(state.expectation_z(5).is_err());
        // Two-qubit gates need distinct targets.
        assert!(state
            .apply_gate(&Gate::Cnot {
                control: 1,
                target: 1
            })
            .is_err());
    }

    #[test]
    fn qubit_cap_enforced() {
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(MAX_QUBITS + 1).is_err());
        assert!(StateVector::zero(MAX_QUBITS).is_ok());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let circuit = ParamCircuit::new(2).unwrap();
        let state = circuit.run(&[]).unwrap();
        assert_eq!(state.amplitudes()[0], re(1.0));
        assert_eq!(state.probabilities()[1..], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn ry_pi_maps_zero_to_one() {
        let mut circuit = ParamCircuit::new(1).unwrap();
        circuit.push_ry(0, Binding::Param(0)).unwrap();
        let state = circuit.run(&[std::f64::consts::PI]).unwrap();
        let probs = state.probabilities();
        assert_abs_diff_eq!(probs[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn double_hadamard_is_identity() {
        let mut circuit = ParamCircuit::new(1).unwrap();
        circuit.push_h(0).unwrap().push_h(0).unwrap();
        let state = circuit.run(&[]).unwrap();
        assert_abs_diff_eq!(state.amplitudes()[0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amplitudes()[1].norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wrong_param_arity_rejected() {
        let mut circuit = ParamCircuit::new(1).unwrap();
        circuit.push_ry(0, Binding::Param(0)).unwrap();
        let err = circuit.run(&[]).unwrap_err();
        assert!(matches!(
            err,
            Error::ParamArityMismatch {
                got: 0,
                expected: 1
            }
        ));
    }

    #[test]
    fn gate_inverse_round_trips_state() {
        let gates = [
            Gate::H { target: 0 },
            Gate::Ry {
                target: 1,
                theta: 0.7,
            },
            Gate::Rz {
                target: 0,
                theta: -1.3,
            },
            Gate::Cnot {
                control: 0,
                target: 2,
            },
            Gate::Cz { a: 1, b: 2 },
            Gate::X { target: 2 },
        ];
        let state = StateVector::zero(3).unwrap().apply_gates(&gates).unwrap();
        let back = state.apply_gates(&inverse_gates(&gates)).unwrap();
        for (a, b) in back
            .amplitudes()
            .iter()
            .zip(StateVector::zero(3).unwrap().amplitudes())
        {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn determinism_bit_identical() {
        let mut circuit = ParamCircuit::new(3).unwrap();
        circuit.push_h(0).unwrap();
        circuit.push_ry(1, Binding::Param(0)).unwrap();
        circuit.push_cnot(0, 2).unwrap();
        circuit.push_rz(2, Binding::Param(1)).unwrap();
        let a = circuit.run(&[0.31, -2.7]).unwrap();
        let b = circuit.run(&[0.31, -2.7]).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }
}
