//! ZZ feature map and fidelity kernel.
//!
//! Embeds a real feature vector x ∈ [0, π]^d into a d-qubit state φ(x) and
//! evaluates k(x, y) = |⟨φ(y)|φ(x)⟩|² through the compute-uncompute
//! construction: run U(x), then U(y)†, and read the probability of the
//! all-zeros outcome. Callers are responsible for scaling features into
//! [0, π] beforehand; out-of-range values are rejected, never clipped.

use std::io::Write as IoWrite;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qsim::{inverse_gates, Binding, ParamCircuit, StateVector};

/// Pair pattern for the entangling blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entanglement {
    /// Pairs (0,1), (1,2), …, (d−2, d−1).
    Linear,
    /// Linear plus the closing pair (d−1, 0). Identical to linear for d ≤ 2.
    Ring,
}

/// Shape of the encoding circuit: one qubit per feature, `reps` repeated
/// encoding blocks, entangling pattern per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureMapSpec {
    pub n_features: usize,
    pub reps: usize,
    pub entanglement: Entanglement,
}

impl FeatureMapSpec {
    pub fn new(n_features: usize, reps: usize, entanglement: Entanglement) -> Result<Self> {
        if n_features == 0 || n_features > crate::qsim::MAX_QUBITS {
            return Err(Error::Config(format!(
                "feature count {n_features} outside supported range 1..={}",
                crate::qsim::MAX_QUBITS
            )));
        }
        if reps == 0 || reps > 4 {
            return Err(Error::Config(format!(
                "encoding repetitions {reps} outside supported range 1..=4"
            )));
        }
        Ok(FeatureMapSpec {
            n_features,
            reps,
            entanglement,
        })
    }

    /// Entangled qubit pairs in application order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let d = self.n_features;
        let mut pairs: Vec<(usize, usize)> = (0..d.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        if self.entanglement == Entanglement::Ring && d > 2 {
            pairs.push((d - 1, 0));
        }
        pairs
    }

    fn check_features(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::DimMismatch(format!(
                "feature vector has {} entries, map expects {}",
                x.len(),
                self.n_features
            )));
        }
        for (index, &value) in x.iter().enumerate() {
            if !(0.0..=std::f64::consts::PI).contains(&value) {
                return Err(Error::FeatureScale { index, value });
            }
        }
        Ok(())
    }
}

/// Build the fully bound encoding circuit U(x).
///
/// Each repetition applies H on every qubit, then RZ(2·x_i) on qubit i, then
/// for each entangled pair (i, j): CNOT(i,j), RZ(2·(π−x_i)(π−x_j)) on j,
/// CNOT(i,j).
pub fn zz_feature_map(x: &[f64], spec: &FeatureMapSpec) -> Result<ParamCircuit> {
    spec.check_features(x)?;
    let pi = std::f64::consts::PI;
    let mut circuit = ParamCircuit::new(spec.n_features)?;
    for _ in 0..spec.reps {
        for q in 0..spec.n_features {
            circuit.push_h(q)?;
        }
        for (q, &xi) in x.iter().enumerate() {
            circuit.push_rz(q, Binding::Fixed(2.0 * xi))?;
        }
        for (i, j) in spec.pairs() {
            let angle = 2.0 * (pi - x[i]) * (pi - x[j]);
            circuit.push_cnot(i, j)?;
            circuit.push_rz(j, Binding::Fixed(angle))?;
            circuit.push_cnot(i, j)?;
        }
    }
    Ok(circuit)
}

/// k(x, y) = |⟨φ(y)|φ(x)⟩|², evaluated as the all-zeros probability after
/// U(x) followed by U(y)†.
pub fn fidelity_kernel(x: &[f64], y: &[f64], spec: &FeatureMapSpec) -> Result<f64> {
    let forward = zz_feature_map(x, spec)?.bind(&[])?;
    let backward = inverse_gates(&zz_feature_map(y, spec)?.bind(&[])?);
    let state = StateVector::zero(spec.n_features)?
        .apply_gates(&forward)?
        .apply_gates(&backward)?;
    // Floating error can push the probability a hair outside [0, 1].
    Ok(state.probabilities()[0].clamp(0.0, 1.0))
}

/// Kernel values for every (row of X, row of Y) pair, with sample ids.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: Vec<Vec<f64>>,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
}

impl KernelMatrix {
    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    /// Smallest eigenvalue, treating the matrix as symmetric. Square input
    /// only.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let n = self.n_rows();
        if n == 0 || n != self.n_cols() {
            return Err(Error::Kernel(format!(
                "eigenvalue check needs a non-empty square matrix, got {}x{}",
                n,
                self.n_cols()
            )));
        }
        let flat: Vec<f64> = self.values.iter().flatten().copied().collect();
        let m = DMatrix::from_row_slice(n, n, &flat);
        let eigen = m.symmetric_eigen();
        Ok(eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Check the Gram-matrix invariants: symmetry within 1e-10, unit
    /// diagonal within 1e-10, entries in [0, 1], smallest eigenvalue
    /// ≥ −1e-8.
    pub fn check_gram(&self) -> Result<()> {
        let n = self.n_rows();
        if n == 0 || n != self.n_cols() {
            return Err(Error::Kernel(format!(
                "Gram check needs a non-empty square matrix, got {}x{}",
                n,
                self.n_cols()
            )));
        }
        for i in 0..n {
            if (self.values[i][i] - 1.0).abs() > 1e-10 {
                return Err(Error::Kernel(format!(
                    "diagonal entry ({i},{i}) = {} is not 1",
                    self.values[i][i]
                )));
            }
            for j in 0..n {
                let v = self.values[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Kernel(format!("entry ({i},{j}) = {v} outside [0,1]")));
                }
                if (v - self.values[j][i]).abs() > 1e-10 {
                    return Err(Error::Kernel(format!(
                        "asymmetry at ({i},{j}): {v} vs {}",
                        self.values[j][i]
                    )));
                }
            }
        }
        let min_eig = self.min_eigenvalue()?;
        if min_eig < -1e-8 {
            return Err(Error::Kernel(format!(
                "smallest eigenvalue {min_eig} below -1e-8"
            )));
        }
        Ok(())
    }

    /// CSV form: header row of column sample ids, then one numeric row per
    /// matrix row, full decimal precision.
    pub fn write_csv<W: IoWrite>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.col_ids.join(","))?;
        for row in &self.values {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}

/// Kernel matrix entry (i, j) = fidelity_kernel(X_i, Y_j). Sample ids are
/// positional (`s0`, `s1`, …).
pub fn kernel_matrix(x: &[Vec<f64>], y: &[Vec<f64>], spec: &FeatureMapSpec) -> Result<KernelMatrix> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut values = Vec::with_capacity(x.len());
    for (i, xi) in x.iter().enumerate() {
        let mut row = Vec::with_capacity(y.len());
        for (j, yj) in y.iter().enumerate() {
            let v = fidelity_kernel(xi, yj, spec)
                .map_err(|e| Error::Kernel(format!("entry ({i},{j}): {e}")))?;
            row.push(v);
        }
        values.push(row);
    }
    Ok(KernelMatrix {
        values,
        row_ids: (0..x.len()).map(|i| format!("s{i}")).collect(),
        col_ids: (0..y.len()).map(|j| format!("s{j}")).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{CircuitOp, Gate};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(d: usize, reps: usize, ent: Entanglement) -> FeatureMapSpec {
        FeatureMapSpec::new(d, reps, ent).unwrap()
    }

    #[test]
    fn single_qubit_zero_input_is_h_then_zero_rz() {
        let circuit = zz_feature_map(&[0.0], &spec(1, 1, Entanglement::Linear)).unwrap();
        assert_eq!(
            circuit.ops(),
            &[
                CircuitOp::H { target: 0 },
                CircuitOp::Rz {
                    target: 0,
                    angle: Binding::Fixed(0.0)
                },
            ]
        );
        // RZ(0) is the identity up to nothing at all, so the state is H|0⟩.
        let state = circuit.run(&[]).unwrap();
        let h_zero = StateVector::zero(1)
            .unwrap()
            .apply_gate(&Gate::H { target: 0 })
            .unwrap();
        for (a, b) in state.amplitudes().iter().zip(h_zero.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_features_give_two_pi_squared_interaction() {
        let pi = std::f64::consts::PI;
        let circuit = zz_feature_map(&[0.0, 0.0], &spec(2, 1, Entanglement::Linear)).unwrap();
        let interaction: Vec<_> = circuit
            .ops()
            .iter()
            .filter_map(|op| match *op {
                CircuitOp::Rz {
                    target: 1,
                    angle: Binding::Fixed(theta),
                } if theta != 0.0 => Some(theta),
                _ => None,
            })
            .collect();
        assert_eq!(interaction.len(), 1);
        assert_abs_diff_eq!(interaction[0], 2.0 * pi * pi, epsilon = 1e-12);
    }

    #[test]
    fn ring_matches_linear_for_two_features() {
        let a = spec(2, 1, Entanglement::Linear);
        let b = spec(2, 1, Entanglement::Ring);
        assert_eq!(a.pairs(), b.pairs());
        assert_eq!(a.pairs(), vec![(0, 1)]);
        assert_eq!(
            spec(3, 1, Entanglement::Ring).pairs(),
            vec![(0, 1), (1, 2), (2, 0)]
        );
        assert!(spec(1, 1, Entanglement::Ring).pairs().is_empty());
    }

    #[test]
    fn out_of_range_and_mismatched_features_rejected() {
        let s = spec(2, 1, Entanglement::Linear);
        let err = zz_feature_map(&[0.5, 3.5], &s).unwrap_err();
        assert!(matches!(err, Error::FeatureScale { index: 1, .. }));
        let err = zz_feature_map(&[-0.1, 0.5], &s).unwrap_err();
        assert!(matches!(err, Error::FeatureScale { index: 0, .. }));
        assert!(matches!(
            zz_feature_map(&[0.5], &s).unwrap_err(),
            Error::DimMismatch(_)
        ));
        assert!(zz_feature_map(&[f64::NAN, 0.0], &s).is_err());
    }

    #[test]
    fn self_fidelity_is_one() {
        let s = spec(3, 2, Entanglement::Ring);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
            let k = fidelity_kernel(&x, &x, &s).unwrap();
            assert_abs_diff_eq!(k, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn kernel_symmetric_in_arguments() {
        let s = spec(2, 2, Entanglement::Linear);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect();
            let kxy = fidelity_kernel(&x, &y, &s).unwrap();
            let kyx = fidelity_kernel(&y, &x, &s).unwrap();
            assert_abs_diff_eq!(kxy, kyx, epsilon = 1e-10);
            assert!((0.0..=1.0).contains(&kxy));
        }
    }

    #[test]
    fn single_sample_gram_is_one() {
        let s = spec(2, 1, Entanglement::Linear);
        let x = vec![vec![0.4, 1.1]];
        let k = kernel_matrix(&x, &x, &s).unwrap();
        assert_eq!(k.n_rows(), 1);
        assert_abs_diff_eq!(k.values[0][0], 1.0, epsilon = 1e-10);
        k.check_gram().unwrap();
    }

    #[test]
    fn identical_samples_give_all_ones() {
        let s = spec(2, 1, Entanglement::Linear);
        let x = vec![vec![0.9, 2.0]; 3];
        let k = kernel_matrix(&x, &x, &s).unwrap();
        for row in &k.values {
            for &v in row {
                assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
            }
        }
        k.check_gram().unwrap();
    }

    #[test]
    fn random_gram_is_psd() {
        let s = spec(2, 2, Entanglement::Linear);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..2).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect())
            .collect();
        let k = kernel_matrix(&x, &x, &s).unwrap();
        k.check_gram().unwrap();
        assert!(k.min_eigenvalue().unwrap() >= -1e-8);
    }

    #[test]
    fn permuting_samples_permutes_rows_and_cols() {
        let s = spec(2, 1, Entanglement::Linear);
        let x = vec![vec![0.1, 0.2], vec![1.0, 2.0], vec![2.5, 0.7]];
        let perm = [2usize, 0, 1];
        let xp: Vec<Vec<f64>> = perm.iter().map(|&i| x[i].clone()).collect();
        let k = kernel_matrix(&x, &x, &s).unwrap();
        let kp = kernel_matrix(&xp, &xp, &s).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_abs_diff_eq!(
                    kp.values[a][b],
                    k.values[perm[a]][perm[b]],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn csv_export_shape() {
        let k = KernelMatrix {
            values: vec![vec![1.0, 0.25], vec![0.25, 1.0]],
            row_ids: vec!["s0".into(), "s1".into()],
            col_ids: vec!["s0".into(), "s1".into()],
        };
        let csv = k.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "s0,s1");
        assert_eq!(lines[1], "1,0.25");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn spec_bounds_enforced() {
        assert!(FeatureMapSpec::new(0, 1, Entanglement::Linear).is_err());
        assert!(FeatureMapSpec::new(13, 1, Entanglement::Linear).is_err());
        assert!(FeatureMapSpec::new(2, 0, Entanglement::Linear).is_err());
        assert!(FeatureMapSpec::new(2, 5, Entanglement::Linear).is_err());
    }
}
