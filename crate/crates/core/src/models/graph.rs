//! Random-walk baselines: three-step bipartite walk similarity, with the
//! popularity-penalized variant.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ModelError, ModelKind, TrainedModel};
use crate::similarity::SimilarityMatrix;
use crate::sparse::{Axis, InteractionMatrix};

/// Which item degree divides the walk similarity in the penalized variant.
/// The destination item is the one being scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PopularityPenalty {
    #[default]
    Destination,
    Source,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    /// Neighborhood size, at least 1.
    pub k: usize,
    /// Walk damping exponent, in [0, 2].
    pub alpha: f64,
    /// Popularity penalty exponent, in [0, 2]; zero recovers the plain walk.
    pub beta: f64,
    #[serde(default)]
    pub penalty: PopularityPenalty,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            k: 100,
            alpha: 1.0,
            beta: 0.0,
            penalty: PopularityPenalty::Destination,
        }
    }
}

impl GraphConfig {
    fn validate(&self) -> Result<(), ModelError> {
        if self.k < 1 {
            return Err(ModelError::InvalidConfig("k must be >= 1".into()));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=2.0).contains(&v) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be in [0, 2], got {v}"
                )));
            }
        }
        Ok(())
    }

    fn params(&self, with_beta: bool) -> Vec<(String, String)> {
        let mut p = vec![
            ("k".into(), self.k.to_string()),
            ("alpha".into(), self.alpha.to_string()),
        ];
        if with_beta {
            p.push(("beta".into(), self.beta.to_string()));
        }
        p
    }
}

/// Walk similarity rows: `s_ij = sum_v p_jv p_vi` with
/// `p_vi = (r_vi / N_v)^alpha`, `p_jv = (r_vj / N_j)^alpha`; target `i` is
/// the scored item. Zero-degree users/items contribute nothing. When
/// `penalize`, entries are divided by the configured item degree raised to
/// beta before top-k truncation.
fn walk_similarity(
    urm: &InteractionMatrix,
    cfg: &GraphConfig,
    penalize: bool,
) -> SimilarityMatrix {
    let n_items = urm.n_cols();
    let user_deg: Vec<f64> = urm.degrees(Axis::Rows).into_iter().map(|d| d as f64).collect();
    let item_deg: Vec<f64> = urm.degrees(Axis::Cols).into_iter().map(|d| d as f64).collect();
    let alpha = cfg.alpha;
    let pow = |x: f64| x.powf(alpha);

    let rows: Vec<Vec<(usize, f64)>> = (0..n_items)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n_items], Vec::<usize>::new()),
            |(acc, touched), target| {
                for (v, r_vi) in urm.col_iter(target) {
                    let p_vi = pow(r_vi / user_deg[v]);
                    for (j, r_vj) in urm.row_iter(v) {
                        if acc[j] == 0.0 {
                            touched.push(j);
                        }
                        acc[j] += pow(r_vj / item_deg[j]) * p_vi;
                    }
                }
                let mut candidates: Vec<(usize, f64)> = Vec::with_capacity(touched.len());
                for &j in touched.iter() {
                    let mut s = acc[j];
                    acc[j] = 0.0;
                    if j == target || s == 0.0 {
                        continue;
                    }
                    if penalize && cfg.beta != 0.0 {
                        match cfg.penalty {
                            PopularityPenalty::Destination => s /= item_deg[target].powf(cfg.beta),
                            PopularityPenalty::Source => s /= item_deg[j].powf(cfg.beta),
                            PopularityPenalty::Both => {
                                s /= item_deg[target].powf(cfg.beta);
                                s /= item_deg[j].powf(cfg.beta);
                            }
                        }
                    }
                    candidates.push((j, s));
                }
                touched.clear();
                candidates
                    .sort_unstable_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                candidates.truncate(cfg.k);
                candidates.sort_unstable_by_key(|&(j, _)| j);
                candidates
            },
        )
        .collect();
    SimilarityMatrix::from_rows(rows)
}

/// Three-step random-walk model; `beta` in the config is ignored.
pub fn train_p3alpha(
    urm: &Arc<InteractionMatrix>,
    cfg: &GraphConfig,
) -> Result<TrainedModel, ModelError> {
    cfg.validate()?;
    let sim = walk_similarity(urm, cfg, false);
    Ok(TrainedModel::from_item_similarity(ModelKind::P3Alpha, sim, Arc::clone(urm))?
        .with_params(cfg.params(false)))
}

/// Popularity-penalized walk model: walk similarities divided by the
/// destination item's degree raised to beta (switchable to source or both).
pub fn train_rp3beta(
    urm: &Arc<InteractionMatrix>,
    cfg: &GraphConfig,
) -> Result<TrainedModel, ModelError> {
    cfg.validate()?;
    let sim = walk_similarity(urm, cfg, true);
    Ok(TrainedModel::from_item_similarity(ModelKind::Rp3Beta, sim, Arc::clone(urm))?
        .with_params(cfg.params(true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseMatrix;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn arc_matrix(
        n_rows: usize,
        n_cols: usize,
        entries: Vec<(usize, usize, f64)>,
    ) -> Arc<SparseMatrix> {
        Arc::new(SparseMatrix::from_entries(n_rows, n_cols, entries).unwrap())
    }

    #[test]
    fn two_by_two_walk_value() {
        // urm = [[1,1],[0,1]]: s_{i1<-i2} = (1/2)(1/2) + (1/2)(0) = 0.25
        let urm = arc_matrix(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]);
        let cfg = GraphConfig {
            k: 2,
            alpha: 1.0,
            ..GraphConfig::default()
        };
        let model = train_p3alpha(&urm, &cfg).unwrap();
        let sim = model.similarity().unwrap();
        // target i = item 0, profile item j = item 1
        assert_relative_eq!(sim.get(0, 1).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn alpha_zero_counts_cooccurrence() {
        let urm = arc_matrix(
            3,
            2,
            vec![(0, 0, 3.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 5.0), (2, 0, 1.0)],
        );
        let cfg = GraphConfig {
            k: 2,
            alpha: 0.0,
            ..GraphConfig::default()
        };
        let model = train_p3alpha(&urm, &cfg).unwrap();
        let sim = model.similarity().unwrap();
        // items 0 and 1 co-occur in users 0 and 1
        assert_relative_eq!(sim.get(0, 1).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(sim.get(1, 0).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn disconnected_items_absent() {
        let urm = arc_matrix(2, 2, vec![(0, 0, 1.0), (1, 1, 1.0)]);
        let model = train_p3alpha(&urm, &GraphConfig::default()).unwrap();
        let sim = model.similarity().unwrap();
        assert!(sim.row(0).is_empty());
        assert!(sim.row(1).is_empty());
    }

    #[test]
    fn walk_matches_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for alpha in [0.0, 0.7, 1.0, 1.8] {
            let mut entries = Vec::new();
            for r in 0..12 {
                for c in 0..9 {
                    if rng.random::<f64>() < 0.35 {
                        entries.push((r, c, 1.0 + rng.random::<f64>() * 4.0));
                    }
                }
            }
            let urm = arc_matrix(12, 9, entries.clone());
            let cfg = GraphConfig {
                k: 9,
                alpha,
                ..GraphConfig::default()
            };
            let model = train_p3alpha(&urm, &cfg).unwrap();
            let dense = recbench_reference::dense_from_entries(12, 9, &entries);
            let full = recbench_reference::p3alpha_full(&dense, alpha);
            let expected = recbench_reference::item_model_scores(&dense, &full);
            for u in 0..12 {
                let got = model.score(u).unwrap();
                for i in 0..9 {
                    assert!(
                        (got[i] - expected[u][i]).abs() <= 1e-12 * expected[u][i].abs().max(1.0),
                        "alpha {alpha}, score[{u}][{i}]: {} vs {}",
                        got[i],
                        expected[u][i]
                    );
                }
            }
        }
    }

    #[test]
    fn beta_zero_equals_plain_walk() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        let mut entries = Vec::new();
        for r in 0..10 {
            for c in 0..8 {
                if rng.random::<f64>() < 0.4 {
                    entries.push((r, c, 1.0));
                }
            }
        }
        let urm = arc_matrix(10, 8, entries);
        let cfg = GraphConfig {
            k: 5,
            alpha: 0.9,
            beta: 0.0,
            penalty: PopularityPenalty::Destination,
        };
        let plain = train_p3alpha(&urm, &cfg).unwrap();
        let penalized = train_rp3beta(&urm, &cfg).unwrap();
        for u in 0..10 {
            assert_eq!(plain.score(u).unwrap(), penalized.score(u).unwrap());
        }
    }

    #[test]
    fn beta_one_divides_by_destination_degree() {
        // destination item 0 has degree 4
        let urm = arc_matrix(
            4,
            2,
            vec![
                (0, 0, 1.0),
                (1, 0, 1.0),
                (2, 0, 1.0),
                (3, 0, 1.0),
                (0, 1, 1.0),
                (1, 1, 1.0),
            ],
        );
        let base = GraphConfig {
            k: 2,
            alpha: 1.0,
            beta: 0.0,
            penalty: PopularityPenalty::Destination,
        };
        let plain = train_p3alpha(&urm, &base).unwrap();
        let penalized = train_rp3beta(
            &urm,
            &GraphConfig {
                beta: 1.0,
                ..base
            },
        )
        .unwrap();
        let s_plain = plain.similarity().unwrap().get(0, 1).unwrap();
        let s_pen = penalized.similarity().unwrap().get(0, 1).unwrap();
        assert_relative_eq!(s_pen, s_plain / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn beta_demotes_popular_destinations() {
        // item 0 popular (4 raters), item 2 unpopular (1 rater); user 3
        // provides the bridge profile containing item 1
        let urm = arc_matrix(
            5,
            3,
            vec![
                (0, 0, 1.0),
                (1, 0, 1.0),
                (2, 0, 1.0),
                (3, 0, 1.0),
                (3, 1, 1.0),
                (3, 2, 1.0),
                (4, 1, 1.0),
            ],
        );
        let base = GraphConfig {
            k: 3,
            alpha: 1.0,
            beta: 0.0,
            penalty: PopularityPenalty::Destination,
        };
        let score_gap = |beta: f64| {
            let cfg = GraphConfig { beta, ..base };
            let model = train_rp3beta(&urm, &cfg).unwrap();
            let s = model.score(4).unwrap();
            s[0] - s[2] // popular minus unpopular destination
        };
        let gap0 = score_gap(0.0);
        let gap1 = score_gap(1.0);
        let gap2 = score_gap(2.0);
        assert!(gap0 > gap1 && gap1 > gap2);
    }

    #[test]
    fn rp3beta_matches_rescaled_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let mut entries = Vec::new();
        for r in 0..11 {
            for c in 0..7 {
                if rng.random::<f64>() < 0.4 {
                    entries.push((r, c, 1.0));
                }
            }
        }
        let urm = arc_matrix(11, 7, entries.clone());
        let cfg = GraphConfig {
            k: 7,
            alpha: 1.2,
            beta: 0.6,
            penalty: PopularityPenalty::Destination,
        };
        let model = train_rp3beta(&urm, &cfg).unwrap();
        let dense = recbench_reference::dense_from_entries(11, 7, &entries);
        let full = recbench_reference::p3alpha_full(&dense, 1.2);
        let rescaled = recbench_reference::rp3beta_rescale(&full, &dense, 0.6);
        let expected = recbench_reference::item_model_scores(&dense, &rescaled);
        for u in 0..11 {
            let got = model.score(u).unwrap();
            for i in 0..7 {
                assert!(
                    (got[i] - expected[u][i]).abs() <= 1e-12 * expected[u][i].abs().max(1.0),
                    "score[{u}][{i}]: {} vs {}",
                    got[i],
                    expected[u][i]
                );
            }
        }
    }

    #[test]
    fn out_of_range_exponents_rejected() {
        let urm = arc_matrix(1, 1, vec![(0, 0, 1.0)]);
        for cfg in [
            GraphConfig {
                alpha: -0.1,
                ..GraphConfig::default()
            },
            GraphConfig {
                beta: 2.5,
                ..GraphConfig::default()
            },
        ] {
            assert!(matches!(
                train_rp3beta(&urm, &cfg),
                Err(ModelError::InvalidConfig(_))
            ));
        }
    }
}
