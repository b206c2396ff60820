//! Ensemble selection as a QUBO: pick a subset of decision stumps whose
//! uniform vote minimizes squared training error plus a sparsity penalty,
//! then solve the binary problem by simulated annealing. An exhaustive
//! solver covers small instances as the correctness oracle.

use std::io::Write as IoWrite;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classical::stump::{fit_stump, Stump};
use crate::error::{Error, Result};

pub const MAX_POOL: usize = 64;
pub const MAX_EXHAUSTIVE: usize = 20;

/// Weak-learner pool with cached ±1 predictions on the training set
/// (`predictions[s][i]` = learner i on sample s).
#[derive(Debug, Clone, PartialEq)]
pub struct WeakLearnerPool {
    pub learners: Vec<Stump>,
    pub predictions: Vec<Vec<f64>>,
}

/// Q stumps, each fit on its own bootstrap resample (N draws with
/// replacement, ≈63% distinct rows) seeded by seed + stump index. Cached
/// predictions are on the full training set, not the resample.
pub fn train_stump_pool(
    xs: &[Vec<f64>],
    ys: &[f64],
    q: usize,
    seed: u64,
) -> Result<WeakLearnerPool> {
    if xs.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if xs.len() != ys.len() {
        return Err(Error::DimMismatch(format!(
            "{} samples but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if q == 0 || q > MAX_POOL {
        return Err(Error::Config(format!(
            "pool size {q} outside supported range 1..={MAX_POOL}"
        )));
    }
    for &y in ys {
        if y != 1.0 && y != -1.0 {
            return Err(Error::Config(format!("labels must be ±1, found {y}")));
        }
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(Error::DegenerateLabels);
    }

    let n = xs.len();
    let mut learners = Vec::with_capacity(q);
    for index in 0..q {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
        let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let sub_x: Vec<Vec<f64>> = rows.iter().map(|&r| xs[r].clone()).collect();
        let sub_y: Vec<f64> = rows.iter().map(|&r| ys[r]).collect();
        let weights = vec![1.0; rows.len()];
        learners.push(fit_stump(&sub_x, &sub_y, &weights)?);
    }
    let predictions: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| learners.iter().map(|l| l.predict_one(x)).collect())
        .collect();
    Ok(WeakLearnerPool {
        learners,
        predictions,
    })
}

/// Quadratic binary program: energy(w) = wᵀ·Q·w + linear·w + constant.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    pub q_matrix: Vec<Vec<f64>>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl QuboProblem {
    pub fn size(&self) -> usize {
        self.linear.len()
    }

    pub fn energy(&self, w: &[u8]) -> f64 {
        let q = self.size();
        let mut total = self.constant;
        for i in 0..q {
            if w[i] == 0 {
                continue;
            }
            total += self.linear[i] + self.q_matrix[i][i];
            for j in 0..q {
                if j != i && w[j] == 1 {
                    total += self.q_matrix[i][j];
                }
            }
        }
        total
    }

    /// Plain triplet export: a `constant` line, then nonzero `i j coeff`
    /// rows (i == j rows carry linear + diagonal, i < j rows carry the
    /// full symmetric pair coefficient).
    pub fn write_triplets<W: IoWrite>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# quadratic binary problem, {} variables", self.size())?;
        writeln!(out, "# energy(w) = sum of coeff*w_i*w_j plus constant")?;
        writeln!(out, "constant {}", self.constant)?;
        for i in 0..self.size() {
            let diag = self.linear[i] + self.q_matrix[i][i];
            if diag != 0.0 {
                writeln!(out, "{i} {i} {diag}")?;
            }
            for j in (i + 1)..self.size() {
                let pair = self.q_matrix[i][j] + self.q_matrix[j][i];
                if pair != 0.0 {
                    writeln!(out, "{i} {j} {pair}")?;
                }
            }
        }
        Ok(())
    }
}

/// Expand Σ_s((1/Q)·Σ_i wᵢhᵢ(x_s) − y_s)² + λ·Σ_i wᵢ into QUBO form.
/// Off-diagonal Q[i][j] = (1/Q²)·Σ_s hᵢ(x_s)hⱼ(x_s); the diagonal stays
/// zero because wᵢ² = wᵢ folds into the linear term
/// N/Q² − (2/Q)·Σ_s hᵢ(x_s)y_s + λ; constant = Σ_s y_s² = N.
pub fn build_qubo(pool: &WeakLearnerPool, ys: &[f64], lambda: f64) -> Result<QuboProblem> {
    let n = pool.predictions.len();
    if n == 0 {
        return Err(Error::EmptyTrainSet);
    }
    if n != ys.len() {
        return Err(Error::DimMismatch(format!(
            "pool caches {n} samples but {} labels given",
            ys.len()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!(
            "penalty λ = {lambda} must be non-negative and finite"
        )));
    }
    let q = pool.learners.len();
    let qf = q as f64;
    let inv_q2 = 1.0 / (qf * qf);

    let mut q_matrix = vec![vec![0.0; q]; q];
    for i in 0..q {
        for j in (i + 1)..q {
            let dot: f64 = pool
                .predictions
                .iter()
                .map(|row| row[i] * row[j])
                .sum();
            q_matrix[i][j] = inv_q2 * dot;
            q_matrix[j][i] = inv_q2 * dot;
        }
    }
    let linear: Vec<f64> = (0..q)
        .map(|i| {
            let corr: f64 = pool
                .predictions
                .iter()
                .zip(ys)
                .map(|(row, &y)| row[i] * y)
                .sum();
            n as f64 * inv_q2 - 2.0 / qf * corr + lambda
        })
        .collect();
    Ok(QuboProblem {
        q_matrix,
        linear,
        constant: n as f64,
    })
}

/// The squared-error + penalty objective computed directly from the
/// cached predictions, bypassing the QUBO expansion. Test oracle for
/// `build_qubo`.
pub fn direct_objective(pool: &WeakLearnerPool, ys: &[f64], lambda: f64, w: &[u8]) -> f64 {
    let q = pool.learners.len() as f64;
    let mut total = 0.0;
    for (row, &y) in pool.predictions.iter().zip(ys) {
        let vote: f64 = row
            .iter()
            .zip(w)
            .filter(|(_, &wi)| wi == 1)
            .map(|(h, _)| h)
            .sum();
        let diff = vote / q - y;
        total += diff * diff;
    }
    total + lambda * w.iter().filter(|&&wi| wi == 1).count() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    pub w: Vec<u8>,
    pub energy: f64,
}

/// Global minimum by enumerating all 2^Q assignments. Ties break to the
/// lexicographically smallest w, so masks enumerate with w[0] as the most
/// significant bit and only strictly better energies replace the
/// incumbent.
pub fn solve_qubo_exhaustive(problem: &QuboProblem) -> Result<BinarySolution> {
    let q = problem.size();
    if q == 0 {
        return Err(Error::EmptyInput);
    }
    if q > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge {
            size: q,
            max: MAX_EXHAUSTIVE,
        });
    }
    let mut best_w = vec![0u8; q];
    let mut best_energy = f64::INFINITY;
    let mut w = vec![0u8; q];
    for mask in 0u64..(1u64 << q) {
        for (i, wi) in w.iter_mut().enumerate() {
            *wi = ((mask >> (q - 1 - i)) & 1) as u8;
        }
        let e = problem.energy(&w);
        if e < best_energy {
            best_energy = e;
            best_w.copy_from_slice(&w);
        }
    }
    Ok(BinarySolution {
        w: best_w,
        energy: best_energy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub alpha: f64,
    pub sweeps: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            t0: 10.0,
            alpha: 0.97,
            sweeps: 2000,
        }
    }
}

impl AnnealSchedule {
    fn check(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::Schedule(format!(
                "initial temperature {} must be positive and finite",
                self.t0
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Schedule(format!(
                "cooling factor {} must lie strictly between 0 and 1",
                self.alpha
            )));
        }
        if self.sweeps == 0 {
            return Err(Error::Schedule("sweep count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Single-bit-flip Metropolis annealing with geometric cooling
/// T = T0·alpha^sweep. Each sweep proposes one flip per variable in index
/// order. Returns the best assignment seen, with its energy recomputed
/// from scratch so incremental drift cannot leak out.
pub fn solve_qubo_sa(
    problem: &QuboProblem,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<BinarySolution> {
    schedule.check()?;
    let q = problem.size();
    if q == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w: Vec<u8> = (0..q).map(|_| u8::from(rng.gen::<bool>())).collect();
    let mut energy = problem.energy(&w);
    let mut best_w = w.clone();
    let mut best_energy = energy;

    for sweep in 0..schedule.sweeps {
        let temp = schedule.t0 * schedule.alpha.powi(sweep as i32);
        for i in 0..q {
            // Energy change of flipping bit i; the delta uses w² = w to
            // fold the diagonal in.
            let delta_dir = 1.0 - 2.0 * f64::from(w[i]);
            let mut field = problem.linear[i] + problem.q_matrix[i][i];
            for j in 0..q {
                if j != i && w[j] == 1 {
                    field += problem.q_matrix[i][j] + problem.q_matrix[j][i];
                }
            }
            let delta = delta_dir * field;
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp();
            if accept {
                w[i] ^= 1;
                energy += delta;
                if energy < best_energy {
                    best_energy = energy;
                    best_w.copy_from_slice(&w);
                }
            }
        }
    }
    let energy = problem.energy(&best_w);
    Ok(BinarySolution { w: best_w, energy })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QboostVariant {
    Qboost,
    QboostPlus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub members: Vec<Stump>,
    /// Pool indices of the selected members.
    pub selected: Vec<usize>,
    pub variant: QboostVariant,
    /// True when the QUBO selected nothing and the single best stump
    /// stood in.
    pub fallback_used: bool,
    /// Accuracy of the final ensemble on its own training rows.
    pub train_accuracy: f64,
    /// Raised when train_accuracy < 0.5; votes are left untouched (no
    /// auto-flip), front ends surface the warning.
    pub polarity_warning: bool,
}

/// Uniform vote of the members; a zero vote sum resolves to +1, the
/// flood side, so warning systems err toward alarm.
pub fn ensemble_predict(ensemble: &Ensemble, xs: &[Vec<f64>]) -> Vec<f64> {
    xs.iter()
        .map(|x| {
            let vote: f64 = ensemble.members.iter().map(|m| m.predict_one(x)).sum();
            if vote >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

fn accuracy(preds: &[f64], ys: &[f64]) -> f64 {
    preds
        .iter()
        .zip(ys)
        .filter(|(p, y)| p == y)
        .count() as f64
        / ys.len() as f64
}

fn selection_from(w: &[u8]) -> Vec<usize> {
    w.iter()
        .enumerate()
        .filter(|(_, &wi)| wi == 1)
        .map(|(i, _)| i)
        .collect()
}

fn ensemble_with(
    pool: &WeakLearnerPool,
    selected: Vec<usize>,
    variant: QboostVariant,
    fallback_used: bool,
    xs: &[Vec<f64>],
    ys: &[f64],
) -> Ensemble {
    let members: Vec<Stump> = selected.iter().map(|&i| pool.learners[i]).collect();
    let mut ensemble = Ensemble {
        members,
        selected,
        variant,
        fallback_used,
        train_accuracy: 0.0,
        polarity_warning: false,
    };
    let preds = ensemble_predict(&ensemble, xs);
    ensemble.train_accuracy = accuracy(&preds, ys);
    ensemble.polarity_warning = ensemble.train_accuracy < 0.5;
    ensemble
}

/// Index of the pool stump with the lowest training error (ties to the
/// lowest index). Fallback when the QUBO keeps nothing.
fn best_single_stump(pool: &WeakLearnerPool, ys: &[f64]) -> usize {
    let mut best = 0usize;
    let mut best_wrong = usize::MAX;
    for i in 0..pool.learners.len() {
        let wrong = pool
            .predictions
            .iter()
            .zip(ys)
            .filter(|(row, &y)| row[i] != y)
            .count();
        if wrong < best_wrong {
            best_wrong = wrong;
            best = i;
        }
    }
    best
}

/// QBoost: stump pool → QUBO → simulated annealing → uniform vote over
/// the selected stumps. The Plus variant re-solves the problem restricted
/// to the base selection over a λ grid {0, λ/2, λ, 2λ} and keeps whichever
/// candidate subset (the base selection included) validates best on the
/// held-out last 20% of the training rows.
pub fn train_qboost(
    xs: &[Vec<f64>],
    ys: &[f64],
    q: usize,
    lambda: f64,
    variant: QboostVariant,
    seed: u64,
) -> Result<Ensemble> {
    let pool = train_stump_pool(xs, ys, q, seed)?;
    let qubo = build_qubo(&pool, ys, lambda)?;
    let solution = solve_qubo_sa(&qubo, &AnnealSchedule::default(), seed)?;
    let base_selected = selection_from(&solution.w);
    let (base_selected, fallback_used) = if base_selected.is_empty() {
        (vec![best_single_stump(&pool, ys)], true)
    } else {
        (base_selected, false)
    };

    if variant == QboostVariant::Qboost {
        return Ok(ensemble_with(&pool, base_selected, variant, fallback_used, xs, ys));
    }

    // Refinement pass. The validation block is the chronological tail of
    // the training fold.
    let val_start = (xs.len() as f64 * 0.8).floor() as usize;
    let val_start = val_start.clamp(1, xs.len().saturating_sub(1));
    let val_x = &xs[val_start..];
    let val_y = &ys[val_start..];

    let validate = |selected: &[usize]| -> f64 {
        let members: Vec<Stump> = selected.iter().map(|&i| pool.learners[i]).collect();
        let preds: Vec<f64> = val_x
            .iter()
            .map(|x| {
                let vote: f64 = members.iter().map(|m| m.predict_one(x)).sum();
                if vote >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        accuracy(&preds, val_y)
    };

    let mut best_selected = base_selected.clone();
    let mut best_score = validate(&base_selected);
    let sub_pool = WeakLearnerPool {
        learners: base_selected.iter().map(|&i| pool.learners[i]).collect(),
        predictions: pool
            .predictions
            .iter()
            .map(|row| base_selected.iter().map(|&i| row[i]).collect())
            .collect(),
    };
    for (grid_index, lam) in [0.0, lambda / 2.0, lambda, 2.0 * lambda].iter().enumerate() {
        let sub_qubo = build_qubo(&sub_pool, ys, *lam)?;
        let sub_solution = solve_qubo_sa(&sub_qubo, &AnnealSchedule::default(), seed.wrapping_add(1 + grid_index as u64))?;
        let candidate: Vec<usize> = selection_from(&sub_solution.w)
            .into_iter()
            .map(|local| base_selected[local])
            .collect();
        if candidate.is_empty() {
            continue;
        }
        let score = validate(&candidate);
        if score > best_score {
            best_score = score;
            best_selected = candidate;
        }
    }
    Ok(ensemble_with(&pool, best_selected, variant, fallback_used, xs, ys))
}
