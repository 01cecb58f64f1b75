//! Ranking metrics over a ranked candidate list and a relevant set, at a set
//! of cutoffs. All values live in [0, 1].

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[serde(rename = "hr")]
    HitRate,
    Precision,
    Recall,
    Ndcg,
    Map,
    Mrr,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::HitRate,
        Metric::Precision,
        Metric::Recall,
        Metric::Ndcg,
        Metric::Map,
        Metric::Mrr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::HitRate => "hr",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::Ndcg => "ndcg",
            Metric::Map => "map",
            Metric::Mrr => "mrr",
        }
    }

    /// Parses a metric name; common aliases accepted, case-insensitive.
    pub fn parse(name: &str) -> Option<Metric> {
        match name.to_ascii_lowercase().as_str() {
            "hr" | "hitrate" | "hit-rate" | "hit_rate" => Some(Metric::HitRate),
            "precision" | "prec" => Some(Metric::Precision),
            "recall" | "rec" => Some(Metric::Recall),
            "ndcg" => Some(Metric::Ndcg),
            "map" => Some(Metric::Map),
            "mrr" => Some(Metric::Mrr),
            _ => None,
        }
    }
}

/// (metric, cutoff) -> value for one ranked list or averaged over users.
pub type MetricValues = BTreeMap<(Metric, usize), f64>;

/// Mean metric values over evaluated users; users without test interactions
/// are skipped and excluded from the denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub values: MetricValues,
    pub evaluated_users: usize,
    pub skipped_users: usize,
}

impl MetricTable {
    pub fn get(&self, metric: Metric, cutoff: usize) -> Option<f64> {
        self.values.get(&(metric, cutoff)).copied()
    }

    /// Values keyed as `"metric@cutoff"`, for serialization.
    pub fn named_values(&self) -> BTreeMap<String, f64> {
        self.values
            .iter()
            .map(|(&(m, c), &v)| (format!("{}@{}", m.name(), c), v))
            .collect()
    }
}

/// Computes HR, Precision, Recall, NDCG, MAP and MRR at each cutoff.
///
/// Gains are binary; NDCG discounts by `1/log2(rank + 1)` with ranks starting
/// at 1 and normalizes by the ideal DCG over `min(|relevant|, cutoff)`. MAP
/// divides the sum of precisions at hits by `min(|relevant|, cutoff)`.
pub fn compute_metrics(
    ranked: &[usize],
    relevant: &HashSet<usize>,
    cutoffs: &[usize],
) -> Result<MetricValues, EvalError> {
    if relevant.is_empty() {
        return Err(EvalError::EmptyRelevantSet);
    }
    let max_cutoff = cutoffs.iter().copied().max().unwrap_or(0);
    // 1-based ranks of relevant items within the list prefix
    let hit_ranks: Vec<usize> = ranked
        .iter()
        .take(max_cutoff)
        .enumerate()
        .filter(|(_, item)| relevant.contains(item))
        .map(|(idx, _)| idx + 1)
        .collect();

    let mut out = MetricValues::new();
    for &c in cutoffs {
        let hits = hit_ranks.iter().filter(|&&r| r <= c).count();
        let ideal = relevant.len().min(c);
        let precision = hits as f64 / c as f64;
        let recall = hits as f64 / relevant.len() as f64;
        let hr = if hits > 0 { 1.0 } else { 0.0 };

        let dcg: f64 = hit_ranks
            .iter()
            .filter(|&&r| r <= c)
            .map(|&r| 1.0 / ((r + 1) as f64).log2())
            .sum();
        let idcg: f64 = (1..=ideal).map(|r| 1.0 / ((r + 1) as f64).log2()).sum();
        let ndcg = if idcg > 0.0 { dcg / idcg } else { 0.0 };

        let ap: f64 = hit_ranks
            .iter()
            .enumerate()
            .filter(|(_, &r)| r <= c)
            .map(|(nth, &r)| (nth + 1) as f64 / r as f64)
            .sum::<f64>()
            / ideal as f64;

        let mrr = hit_ranks
            .iter()
            .find(|&&r| r <= c)
            .map_or(0.0, |&r| 1.0 / r as f64);

        out.insert((Metric::HitRate, c), hr);
        out.insert((Metric::Precision, c), precision);
        out.insert((Metric::Recall, c), recall);
        out.insert((Metric::Ndcg, c), ndcg);
        out.insert((Metric::Map, c), ap);
        out.insert((Metric::Mrr, c), mrr);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn relevant(items: &[usize]) -> HashSet<usize> {
        items.iter().copied().collect()
    }

    #[test]
    fn single_relevant_at_rank_three() {
        let ranked = vec![7, 8, 3, 9, 10];
        let m = compute_metrics(&ranked, &relevant(&[3]), &[10]).unwrap();
        assert_eq!(m[&(Metric::HitRate, 10)], 1.0);
        assert_relative_eq!(m[&(Metric::Ndcg, 10)], 1.0 / 4.0f64.log2(), epsilon = 1e-15);
        assert_relative_eq!(m[&(Metric::Ndcg, 10)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m[&(Metric::Mrr, 10)], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(m[&(Metric::Map, 10)], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(m[&(Metric::Precision, 10)], 0.1, epsilon = 1e-15);
        assert_relative_eq!(m[&(Metric::Recall, 10)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn perfect_ranking_is_all_ones() {
        let ranked = vec![4, 2, 9, 1, 0];
        let rel = relevant(&[4, 2, 9]);
        for c in [3, 5, 10] {
            let m = compute_metrics(&ranked, &rel, &[c]).unwrap();
            for metric in [Metric::HitRate, Metric::Recall, Metric::Ndcg, Metric::Map, Metric::Mrr]
            {
                assert_relative_eq!(m[&(metric, c)], 1.0, epsilon = 1e-15);
            }
            assert_relative_eq!(m[&(Metric::Precision, c)], 3.0f64.min(c as f64) / c as f64);
        }
    }

    #[test]
    fn no_hits_is_all_zeros() {
        let ranked = vec![1, 2, 3];
        let m = compute_metrics(&ranked, &relevant(&[9]), &[3]).unwrap();
        for metric in Metric::ALL {
            assert_eq!(m[&(metric, 3)], 0.0);
        }
    }

    #[test]
    fn empty_relevant_set_is_error() {
        assert!(matches!(
            compute_metrics(&[1, 2], &HashSet::new(), &[5]),
            Err(EvalError::EmptyRelevantSet)
        ));
    }

    #[test]
    fn leave_one_out_rank_formulas_across_cutoffs() {
        // single positive at rank r: NDCG@c = 1/log2(r+1), MRR@c = 1/r for
        // r <= c, zero beyond
        for r in 1..=12usize {
            let ranked: Vec<usize> = (0..20).map(|i| if i == r - 1 { 99 } else { i }).collect();
            let m =
                compute_metrics(&ranked, &relevant(&[99]), &[5, 10, 20, 50, 100]).unwrap();
            for c in [5usize, 10, 20, 50, 100] {
                if r <= c {
                    assert_relative_eq!(
                        m[&(Metric::Ndcg, c)],
                        1.0 / ((r + 1) as f64).log2(),
                        epsilon = 1e-15
                    );
                    assert_relative_eq!(m[&(Metric::Mrr, c)], 1.0 / r as f64, epsilon = 1e-15);
                    assert_eq!(m[&(Metric::HitRate, c)], 1.0);
                } else {
                    assert_eq!(m[&(Metric::Ndcg, c)], 0.0);
                    assert_eq!(m[&(Metric::Mrr, c)], 0.0);
                    assert_eq!(m[&(Metric::HitRate, c)], 0.0);
                }
            }
        }
    }

    #[test]
    fn map_with_multiple_relevant() {
        // relevant at ranks 1 and 3 of [a, x, b]; c = 3, |rel| = 2:
        // MAP = (1/2) (1/1 + 2/3)
        let m = compute_metrics(&[10, 11, 12], &relevant(&[10, 12]), &[3]).unwrap();
        assert_relative_eq!(m[&(Metric::Map, 3)], 0.5 * (1.0 + 2.0 / 3.0), epsilon = 1e-15);
        assert_relative_eq!(
            m[&(Metric::Ndcg, 3)],
            (1.0 + 1.0 / 4.0f64.log2()) / (1.0 + 1.0 / 3.0f64.log2()),
            epsilon = 1e-15
        );
    }

    #[test]
    fn values_in_unit_interval_and_monotone() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(5..40);
            let mut ranked: Vec<usize> = (0..n).collect();
            ranked.shuffle(&mut rng);
            let n_rel = rng.random_range(1..n);
            let rel: HashSet<usize> = (0..n_rel).collect();
            let cutoffs: Vec<usize> = vec![1, 3, 5, 10, 50];
            let m = compute_metrics(&ranked, &rel, &cutoffs).unwrap();
            let mut prev_recall = 0.0;
            let mut prev_hits = 0.0;
            for &c in &cutoffs {
                for metric in Metric::ALL {
                    let v = m[&(metric, c)];
                    assert!((0.0..=1.0 + 1e-12).contains(&v), "{metric:?}@{c} = {v}");
                }
                let recall = m[&(Metric::Recall, c)];
                assert!(recall + 1e-15 >= prev_recall);
                prev_recall = recall;
                let hits = m[&(Metric::Precision, c)] * c as f64;
                assert!(hits + 1e-12 >= prev_hits);
                prev_hits = hits;
            }
        }
    }

    #[test]
    fn metric_name_parsing() {
        assert_eq!(Metric::parse("PREC"), Some(Metric::Precision));
        assert_eq!(Metric::parse("HitRate"), Some(Metric::HitRate));
        assert_eq!(Metric::parse("ndcg"), Some(Metric::Ndcg));
        assert_eq!(Metric::parse("unknown"), None);
    }
}
