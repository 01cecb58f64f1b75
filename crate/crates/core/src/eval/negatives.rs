//! Negative sampling for the sampled-ranking protocol: each test user ranks
//! the held-out positives against n uniformly sampled non-interacted items.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EvalError, SplitPair};
use crate::seeding;

/// Ranking candidates for one evaluated user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCandidates {
    /// The user's test items, ascending.
    pub positives: Vec<usize>,
    /// Sampled items the user never interacted with, in draw order.
    pub negatives: Vec<usize>,
}

/// Per-user candidate sets; `None` for users without test interactions.
#[derive(Debug, Clone)]
pub struct NegativeSampleSet {
    pub per_user: Vec<Option<UserCandidates>>,
    /// Requested negatives per positive.
    pub n_per_positive: usize,
    pub seed: u64,
    /// Users whose eligible pool was smaller than requested; they receive
    /// every remaining item instead.
    pub exhausted_users: usize,
}

/// Draws, per test user, `n` negatives per positive, uniformly without
/// replacement from the items absent from both the user's train and test
/// sets. Deterministic given (split, n, seed).
pub fn sample_negatives(
    split: &SplitPair,
    n: usize,
    seed: u64,
) -> Result<NegativeSampleSet, EvalError> {
    if n < 1 {
        return Err(EvalError::InvalidNegativeCount);
    }
    let n_items = split.train.n_cols();
    let mut per_user = Vec::with_capacity(split.train.n_rows());
    let mut exhausted_users = 0;
    let mut interacted = vec![false; n_items];
    for user in 0..split.train.n_rows() {
        let (test_items, _) = split.test.row(user);
        if test_items.is_empty() {
            per_user.push(None);
            continue;
        }
        let (train_items, _) = split.train.row(user);
        for &i in train_items.iter().chain(test_items) {
            interacted[i] = true;
        }
        let mut eligible: Vec<usize> = (0..n_items).filter(|&i| !interacted[i]).collect();
        for &i in train_items.iter().chain(test_items) {
            interacted[i] = false;
        }

        let requested = n * test_items.len();
        let take = requested.min(eligible.len());
        if take < requested {
            exhausted_users += 1;
        }
        // partial Fisher-Yates over the ascending eligible list
        let mut rng = ChaCha8Rng::seed_from_u64(seeding::mix(seed, user as u64));
        let mut negatives = Vec::with_capacity(take);
        for k in 0..take {
            let pick = rng.random_range(k..eligible.len());
            eligible.swap(k, pick);
            negatives.push(eligible[k]);
        }
        per_user.push(Some(UserCandidates {
            positives: test_items.to_vec(),
            negatives,
        }));
    }
    Ok(NegativeSampleSet {
        per_user,
        n_per_positive: n,
        seed,
        exhausted_users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{split_leave_one_out, LeaveOneOutMode};
    use crate::sparse::SparseMatrix;

    fn loo_split(n_users: usize, n_items: usize, entries: Vec<(usize, usize, f64)>) -> SplitPair {
        let m = SparseMatrix::from_entries(n_users, n_items, entries).unwrap();
        split_leave_one_out(&m, LeaveOneOutMode::RandomOne, None, 3).unwrap()
    }

    #[test]
    fn exhausted_pool_takes_remaining() {
        // catalog of 5; user 0 interacted with 4 items -> exactly 1 negative
        let split = loo_split(
            1,
            5,
            vec![(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)],
        );
        let negatives = sample_negatives(&split, 100, 1).unwrap();
        let user = negatives.per_user[0].as_ref().unwrap();
        assert_eq!(user.negatives, vec![4]);
        assert_eq!(negatives.exhausted_users, 1);
    }

    #[test]
    fn negatives_never_intersect_positives() {
        let mut entries = Vec::new();
        for u in 0..20 {
            for i in 0..30 {
                if (u * 7 + i * 3) % 5 == 0 {
                    entries.push((u, i, 1.0));
                }
            }
        }
        let split = loo_split(20, 30, entries);
        let negatives = sample_negatives(&split, 5, 11).unwrap();
        for user in 0..20 {
            if let Some(c) = &negatives.per_user[user] {
                let (train_items, _) = split.train.row(user);
                for neg in &c.negatives {
                    assert!(!c.positives.contains(neg));
                    assert!(!train_items.contains(neg));
                }
                let mut uniq = c.negatives.clone();
                uniq.sort_unstable();
                uniq.dedup();
                assert_eq!(uniq.len(), c.negatives.len(), "duplicates drawn");
            }
        }
    }

    #[test]
    fn sampling_is_uniform_over_eligible() {
        // user consumed items 0 and 1 of 12; eligible pool is the other 10.
        // 10_000 single-negative draws: chi-square against uniform with
        // df = 9 must stay below the 0.999 quantile (27.88).
        let split = loo_split(1, 12, vec![(0, 0, 1.0), (0, 1, 1.0)]);
        let mut counts = vec![0usize; 12];
        for seed in 0..10_000 {
            let negatives = sample_negatives(&split, 1, seed).unwrap();
            let user = negatives.per_user[0].as_ref().unwrap();
            assert_eq!(user.negatives.len(), 1);
            counts[user.negatives[0]] += 1;
        }
        assert_eq!(counts[0] + counts[1], 0);
        let expected = 10_000.0 / 10.0;
        let chi2: f64 = counts[2..]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 27.88, "chi-square {chi2}");
    }

    #[test]
    fn zero_negatives_rejected() {
        let split = loo_split(1, 3, vec![(0, 0, 1.0), (0, 1, 1.0)]);
        assert!(matches!(
            sample_negatives(&split, 0, 1),
            Err(EvalError::InvalidNegativeCount)
        ));
    }
}
