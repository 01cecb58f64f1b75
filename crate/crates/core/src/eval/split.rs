//! Train/test splitting: per-interaction random holdout (Bernoulli or exact
//! count) and per-user leave-one-out.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::seeding;
use crate::sparse::{InteractionMatrix, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeaveOneOutMode {
    /// Hold out the interaction with the largest timestamp (ties: lower item).
    LastByTimestamp,
    /// Hold out one uniformly chosen interaction per user.
    RandomOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum SplitMethod {
    Holdout { ratio: f64, exact: bool },
    LeaveOneOut { mode: LeaveOneOutMode },
    /// Split files provided externally; resampling audits fall back to a
    /// Bernoulli holdout at the observed train fraction.
    Imported,
}

/// A train/test pair over the same user and item index space; the entry sets
/// are disjoint and their union is the input entry set.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: InteractionMatrix,
    pub test: InteractionMatrix,
    pub seed: u64,
    pub method: SplitMethod,
}

impl SplitPair {
    /// Fraction of entries in the train side.
    pub fn train_fraction(&self) -> f64 {
        let total = self.train.nnz() + self.test.nnz();
        if total == 0 {
            0.0
        } else {
            self.train.nnz() as f64 / total as f64
        }
    }
}

fn assemble(
    m: &InteractionMatrix,
    train_entries: Vec<(usize, usize, f64)>,
    test_entries: Vec<(usize, usize, f64)>,
    seed: u64,
    method: SplitMethod,
) -> Result<SplitPair, EvalError> {
    let train = SparseMatrix::from_entries(m.n_rows(), m.n_cols(), train_entries)?;
    let test = SparseMatrix::from_entries(m.n_rows(), m.n_cols(), test_entries)?;
    Ok(SplitPair {
        train,
        test,
        seed,
        method,
    })
}

/// Assigns each interaction to train with probability `ratio`, independently,
/// using a seeded generator; deterministic given (data, ratio, seed).
pub fn split_random_holdout(
    m: &InteractionMatrix,
    ratio: f64,
    seed: u64,
) -> Result<SplitPair, EvalError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(EvalError::InvalidRatio(ratio));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::mix(seed, 0x11));
    let mut train_entries = Vec::new();
    let mut test_entries = Vec::new();
    for entry in m.to_entries() {
        if rng.random::<f64>() < ratio {
            train_entries.push(entry);
        } else {
            test_entries.push(entry);
        }
    }
    assemble(
        m,
        train_entries,
        test_entries,
        seed,
        SplitMethod::Holdout { ratio, exact: false },
    )
}

/// Exact-count variant: a seeded shuffle puts exactly `round(ratio * nnz)`
/// interactions into train.
pub fn split_random_holdout_exact(
    m: &InteractionMatrix,
    ratio: f64,
    seed: u64,
) -> Result<SplitPair, EvalError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(EvalError::InvalidRatio(ratio));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::mix(seed, 0x12));
    let entries = m.to_entries();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.shuffle(&mut rng);
    let n_train = (ratio * entries.len() as f64).round() as usize;
    let mut train_entries = Vec::with_capacity(n_train);
    let mut test_entries = Vec::with_capacity(entries.len() - n_train);
    for (pos, &idx) in order.iter().enumerate() {
        if pos < n_train {
            train_entries.push(entries[idx]);
        } else {
            test_entries.push(entries[idx]);
        }
    }
    assemble(
        m,
        train_entries,
        test_entries,
        seed,
        SplitMethod::Holdout { ratio, exact: true },
    )
}

/// Holds out exactly one interaction per user with at least two interactions;
/// single-interaction users stay entirely in train.
pub fn split_leave_one_out(
    m: &InteractionMatrix,
    mode: LeaveOneOutMode,
    timestamps: Option<&HashMap<(usize, usize), i64>>,
    seed: u64,
) -> Result<SplitPair, EvalError> {
    let mut train_entries = Vec::new();
    let mut test_entries = Vec::new();
    for user in 0..m.n_rows() {
        let (items, values) = m.row(user);
        if items.len() < 2 {
            for (i, &item) in items.iter().enumerate() {
                train_entries.push((user, item, values[i]));
            }
            continue;
        }
        let held_out = match mode {
            LeaveOneOutMode::LastByTimestamp => {
                let ts = timestamps.ok_or(EvalError::MissingTimestamps)?;
                let mut best: Option<(i64, usize)> = None;
                for &item in items {
                    let t = *ts.get(&(user, item)).ok_or(EvalError::MissingTimestamps)?;
                    // max timestamp; ties resolved toward the lower item index
                    let better = match best {
                        None => true,
                        Some((bt, bi)) => t > bt || (t == bt && item < bi),
                    };
                    if better {
                        best = Some((t, item));
                    }
                }
                best.expect("at least two interactions").1
            }
            LeaveOneOutMode::RandomOne => {
                let mut rng = ChaCha8Rng::seed_from_u64(seeding::mix(seed, user as u64));
                items[rng.random_range(0..items.len())]
            }
        };
        for (i, &item) in items.iter().enumerate() {
            if item == held_out {
                test_entries.push((user, item, values[i]));
            } else {
                train_entries.push((user, item, values[i]));
            }
        }
    }
    assemble(
        m,
        train_entries,
        test_entries,
        seed,
        SplitMethod::LeaveOneOut { mode },
    )
}
