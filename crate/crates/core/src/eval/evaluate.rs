//! Per-user evaluation: rank candidates, compute metrics, average over the
//! users that have test interactions.

use std::collections::HashSet;

use rayon::prelude::*;

use super::metrics::{compute_metrics, MetricTable, MetricValues};
use super::{EvalError, NegativeSampleSet, SplitPair};
use crate::models::{sort_desc_by_score, TrainedModel};

/// Evaluates `model` (trained on `split.train`) on the test side.
///
/// Candidates are the full catalog minus the user's train items, or the
/// user's positives plus sampled negatives when `negatives` is given. Metric
/// means are arithmetic over evaluated users; users without test
/// interactions are skipped and counted.
pub fn evaluate_model(
    model: &TrainedModel,
    split: &SplitPair,
    negatives: Option<&NegativeSampleSet>,
    cutoffs: &[usize],
) -> Result<MetricTable, EvalError> {
    if model.n_users() != split.train.n_rows() || model.n_items() != split.train.n_cols() {
        return Err(EvalError::DimensionMismatch {
            left: model.n_items(),
            right: split.train.n_cols(),
            context: "model dimensions vs split",
        });
    }
    if let Some(neg) = negatives {
        if neg.per_user.len() != split.train.n_rows() {
            return Err(EvalError::DimensionMismatch {
                left: neg.per_user.len(),
                right: split.train.n_rows(),
                context: "negative sample set vs user count",
            });
        }
    }
    let max_cutoff = cutoffs.iter().copied().max().unwrap_or(0);

    let per_user: Vec<Result<Option<MetricValues>, EvalError>> = (0..split.train.n_rows())
        .into_par_iter()
        .map(|user| {
            let (test_items, _) = split.test.row(user);
            if test_items.is_empty() {
                return Ok(None);
            }
            let scores = model.score(user)?;
            let mut candidates: Vec<usize> = match negatives {
                Some(neg) => {
                    let c = neg.per_user[user]
                        .as_ref()
                        .expect("user with test interactions has candidates");
                    c.positives.iter().chain(&c.negatives).copied().collect()
                }
                None => {
                    let (seen, _) = split.train.row(user);
                    let mut mask = vec![false; scores.len()];
                    for &i in seen {
                        mask[i] = true;
                    }
                    (0..scores.len()).filter(|&i| !mask[i]).collect()
                }
            };
            sort_desc_by_score(&mut candidates, &scores);
            candidates.truncate(max_cutoff);
            let relevant: HashSet<usize> = test_items.iter().copied().collect();
            compute_metrics(&candidates, &relevant, cutoffs).map(Some)
        })
        .collect();

    let mut sums = MetricValues::new();
    let mut evaluated_users = 0;
    let mut skipped_users = 0;
    for result in per_user {
        match result? {
            None => skipped_users += 1,
            Some(values) => {
                evaluated_users += 1;
                for (key, v) in values {
                    *sums.entry(key).or_insert(0.0) += v;
                }
            }
        }
    }
    if evaluated_users == 0 {
        return Err(EvalError::NoTestUsers);
    }
    for v in sums.values_mut() {
        *v /= evaluated_users as f64;
    }
    Ok(MetricTable {
        values: sums,
        evaluated_users,
        skipped_users,
    })
}
