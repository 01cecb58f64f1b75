//! The four nearest-neighbor baselines: collaborative item/user KNN, the
//! content-based variant and the rating++feature hybrid.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ModelError, ModelKind, TrainedModel};
use crate::similarity::{apply_weighting, cosine_topk, KnnConfig, Weighting};
use crate::sparse::{FeatureMatrix, InteractionMatrix};

/// Hybrid config: KNN settings plus the weight `w > 0` of the feature block
/// in the concatenated item vector `[r_i ; w f_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub knn: KnnConfig,
    pub w: f64,
}

fn knn_params(cfg: &KnnConfig) -> Vec<(String, String)> {
    vec![
        ("k".into(), cfg.k.to_string()),
        ("h".into(), cfg.h.to_string()),
        ("weighting".into(), format!("{:?}", cfg.weighting).to_lowercase()),
        ("normalize".into(), cfg.normalize.to_string()),
    ]
}

/// Item-item collaborative KNN: cosine similarity between the item columns
/// of the (optionally weighted) interaction matrix.
pub fn train_item_knn(
    urm: &Arc<InteractionMatrix>,
    cfg: &KnnConfig,
) -> Result<TrainedModel, ModelError> {
    // URM rows are users, i.e. already the document axis for weighting.
    let sim = cosine_topk(urm, cfg)?;
    Ok(TrainedModel::from_item_similarity(ModelKind::ItemKnn, sim, Arc::clone(urm))?
        .with_params(knn_params(cfg)))
}

/// User-user collaborative KNN; scores are `sum_v s_uv * r_v`.
pub fn train_user_knn(
    urm: &Arc<InteractionMatrix>,
    cfg: &KnnConfig,
) -> Result<TrainedModel, ModelError> {
    // Weight with users as documents, then compare user vectors (columns of
    // the transpose).
    let weighted = apply_weighting(urm, cfg.weighting);
    let unweighted_cfg = KnnConfig {
        weighting: Weighting::None,
        ..*cfg
    };
    let sim = cosine_topk(&weighted.transpose(), &unweighted_cfg)?;
    Ok(TrainedModel::from_user_similarity(sim, Arc::clone(urm))?.with_params(knn_params(cfg)))
}

/// Content-based item KNN: cosine similarity between item feature vectors;
/// scoring propagates through the interaction profiles as in item KNN.
pub fn train_item_knn_cbf(
    urm: &Arc<InteractionMatrix>,
    icm: &FeatureMatrix,
    cfg: &KnnConfig,
) -> Result<TrainedModel, ModelError> {
    if icm.n_rows() != urm.n_cols() {
        return Err(ModelError::DimensionMismatch {
            left: icm.n_rows(),
            right: urm.n_cols(),
            context: "feature matrix items vs interaction matrix items",
        });
    }
    // ICM rows are items: weight as documents, then compare item vectors.
    let weighted = apply_weighting(icm, cfg.weighting);
    let unweighted_cfg = KnnConfig {
        weighting: Weighting::None,
        ..*cfg
    };
    let sim = cosine_topk(&weighted.transpose(), &unweighted_cfg)?;
    Ok(TrainedModel::from_item_similarity(ModelKind::ItemKnnCbf, sim, Arc::clone(urm))?
        .with_params(knn_params(cfg)))
}

/// Hybrid CF+CBF item KNN over concatenated vectors `[r_i ; w f_i]`.
///
/// Each block is weighted under its own document axis (users for ratings,
/// items for features) before concatenation, so `w -> 0` recovers the plain
/// collaborative item KNN similarity.
pub fn train_item_knn_cfcbf(
    urm: &Arc<InteractionMatrix>,
    icm: &FeatureMatrix,
    cfg: &HybridConfig,
) -> Result<TrainedModel, ModelError> {
    if !(cfg.w > 0.0 && cfg.w.is_finite()) {
        return Err(ModelError::InvalidConfig(format!(
            "feature weight w must be > 0, got {}",
            cfg.w
        )));
    }
    if icm.n_rows() != urm.n_cols() {
        return Err(ModelError::DimensionMismatch {
            left: icm.n_rows(),
            right: urm.n_cols(),
            context: "feature matrix items vs interaction matrix items",
        });
    }
    let weighted_cf = apply_weighting(urm, cfg.knn.weighting);
    let weighted_cbf = apply_weighting(icm, cfg.knn.weighting);
    let stacked = weighted_cf
        .vstack(&weighted_cbf.transpose().scaled(cfg.w))
        .map_err(|_| ModelError::DimensionMismatch {
            left: weighted_cf.n_cols(),
            right: weighted_cbf.n_rows(),
            context: "stacking ratings over features",
        })?;
    let unweighted_cfg = KnnConfig {
        weighting: Weighting::None,
        ..cfg.knn
    };
    let sim = cosine_topk(&stacked, &unweighted_cfg)?;
    let mut params = knn_params(&cfg.knn);
    params.push(("w".into(), cfg.w.to_string()));
    Ok(TrainedModel::from_item_similarity(ModelKind::ItemKnnCfCbf, sim, Arc::clone(urm))?
        .with_params(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseMatrix;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn arc_matrix(n_rows: usize, n_cols: usize, entries: Vec<(usize, usize, f64)>) -> Arc<SparseMatrix> {
        Arc::new(SparseMatrix::from_entries(n_rows, n_cols, entries).unwrap())
    }

    fn random_binary(
        rng: &mut impl Rng,
        n_rows: usize,
        n_cols: usize,
        density: f64,
    ) -> Vec<(usize, usize, f64)> {
        let mut entries = Vec::new();
        for r in 0..n_rows {
            for c in 0..n_cols {
                if rng.random::<f64>() < density {
                    entries.push((r, c, 1.0));
                }
            }
        }
        entries
    }

    #[test]
    fn single_neighbor_propagation() {
        // user 0 consumed exactly item 0; its sole neighbor is item 1
        let urm = arc_matrix(
            3,
            2,
            vec![(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 1.0)],
        );
        let cfg = KnnConfig {
            k: 1,
            ..KnnConfig::default()
        };
        let model = train_item_knn(&urm, &cfg).unwrap();
        let s01 = model.similarity().unwrap().get(1, 0).unwrap();
        assert_relative_eq!(s01, 0.5, epsilon = 1e-12); // 1/(sqrt2*sqrt2)
        let scores = model.score(0).unwrap();
        assert_relative_eq!(scores[1], s01, epsilon = 1e-15);
    }

    #[test]
    fn k_one_keeps_strongest() {
        let urm = arc_matrix(
            3,
            3,
            vec![
                (0, 0, 1.0),
                (0, 1, 1.0),
                (1, 0, 1.0),
                (1, 1, 1.0),
                (2, 0, 1.0),
                (2, 2, 1.0),
            ],
        );
        let cfg = KnnConfig {
            k: 1,
            ..KnnConfig::default()
        };
        let model = train_item_knn(&urm, &cfg).unwrap();
        let sim = model.similarity().unwrap();
        // item 0 overlaps item 1 twice, item 2 once: neighbor of 0 is 1
        assert_eq!(sim.neighbors(0), vec![1]);
    }

    #[test]
    fn item_knn_matches_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let entries = random_binary(&mut rng, 10, 8, 0.4);
        let urm = arc_matrix(10, 8, entries.clone());
        let cfg = KnnConfig {
            k: 8,
            h: 0.0,
            weighting: Weighting::None,
            normalize: true,
        };
        let model = train_item_knn(&urm, &cfg).unwrap();
        let dense = recbench_reference::dense_from_entries(10, 8, &entries);
        let full = recbench_reference::cosine_full(&dense, 0.0, true);
        let expected = recbench_reference::item_model_scores(&dense, &full);
        for u in 0..10 {
            let got = model.score(u).unwrap();
            for i in 0..8 {
                assert_relative_eq!(got[i], expected[u][i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn user_knn_identical_users() {
        let urm = arc_matrix(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        let model = train_user_knn(&urm, &KnnConfig::default()).unwrap();
        let sim = model.similarity().unwrap();
        assert_relative_eq!(sim.get(0, 1).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(sim.get(1, 0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn user_knn_empty_profile_scores_zero() {
        let urm = arc_matrix(3, 2, vec![(0, 0, 1.0), (1, 1, 1.0)]);
        let model = train_user_knn(&urm, &KnnConfig::default()).unwrap();
        assert_eq!(model.score(2).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn user_knn_matches_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        let entries = random_binary(&mut rng, 9, 7, 0.45);
        let urm = arc_matrix(9, 7, entries.clone());
        let cfg = KnnConfig {
            k: 9,
            h: 0.7,
            weighting: Weighting::None,
            normalize: true,
        };
        let model = train_user_knn(&urm, &cfg).unwrap();
        let dense = recbench_reference::dense_from_entries(9, 7, &entries);
        // user vectors are rows; similarity over columns of the transpose
        let dense_t: Vec<Vec<f64>> = (0..7)
            .map(|c| (0..9).map(|r| dense[r][c]).collect())
            .collect();
        let full = recbench_reference::cosine_full(&dense_t, 0.7, true);
        let expected = recbench_reference::user_model_scores(&dense, &full);
        for u in 0..9 {
            let got = model.score(u).unwrap();
            for i in 0..7 {
                assert_relative_eq!(got[i], expected[u][i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cbf_identical_feature_rows() {
        let urm = arc_matrix(2, 2, vec![(0, 0, 1.0), (1, 1, 1.0)]);
        let icm = SparseMatrix::from_entries(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 0, 1.0), (1, 2, 2.0)])
            .unwrap();
        let model = train_item_knn_cbf(&urm, &icm, &KnnConfig::default()).unwrap();
        assert_relative_eq!(
            model.similarity().unwrap().get(0, 1).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cbf_featureless_item_never_recommended() {
        let urm = arc_matrix(2, 3, vec![(0, 0, 1.0), (1, 1, 1.0), (1, 2, 1.0)]);
        // item 2 has no features
        let icm =
            SparseMatrix::from_entries(3, 2, vec![(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let model = train_item_knn_cbf(&urm, &icm, &KnnConfig::default()).unwrap();
        let sim = model.similarity().unwrap();
        assert!(sim.row(2).is_empty());
        for t in 0..3 {
            assert!(sim.get(t, 2).is_none());
        }
        for u in 0..2 {
            assert_eq!(model.score(u).unwrap()[2], 0.0);
        }
    }

    #[test]
    fn cbf_dimension_mismatch() {
        let urm = arc_matrix(2, 3, vec![(0, 0, 1.0)]);
        let icm = SparseMatrix::from_entries(2, 2, vec![(0, 0, 1.0)]).unwrap();
        assert!(matches!(
            train_item_knn_cbf(&urm, &icm, &KnnConfig::default()),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cbf_matches_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let urm_entries = random_binary(&mut rng, 8, 12, 0.3);
        let icm_entries = random_binary(&mut rng, 12, 6, 0.4);
        let urm = arc_matrix(8, 12, urm_entries.clone());
        let icm = SparseMatrix::from_entries(12, 6, icm_entries.clone()).unwrap();
        let cfg = KnnConfig {
            k: 12,
            h: 1.5,
            weighting: Weighting::None,
            normalize: true,
        };
        let model = train_item_knn_cbf(&urm, &icm, &cfg).unwrap();
        let dense_urm = recbench_reference::dense_from_entries(8, 12, &urm_entries);
        let dense_icm = recbench_reference::dense_from_entries(12, 6, &icm_entries);
        // item vectors are ICM rows -> transpose so columns are items
        let icm_t: Vec<Vec<f64>> = (0..6)
            .map(|f| (0..12).map(|i| dense_icm[i][f]).collect())
            .collect();
        let full = recbench_reference::cosine_full(&icm_t, 1.5, true);
        let expected = recbench_reference::item_model_scores(&dense_urm, &full);
        for u in 0..8 {
            let got = model.score(u).unwrap();
            for i in 0..12 {
                assert_relative_eq!(got[i], expected[u][i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cfcbf_identical_in_both_blocks() {
        let urm = arc_matrix(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 2.0)]);
        let icm =
            SparseMatrix::from_entries(2, 2, vec![(0, 1, 3.0), (1, 1, 3.0)]).unwrap();
        let cfg = HybridConfig {
            knn: KnnConfig::default(),
            w: 2.0,
        };
        let model = train_item_knn_cfcbf(&urm, &icm, &cfg).unwrap();
        assert_relative_eq!(
            model.similarity().unwrap().get(0, 1).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn cfcbf_tiny_w_recovers_item_knn() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(24);
        let mut urm_entries = random_binary(&mut rng, 9, 6, 0.5);
        // a user who rated everything guarantees every pair overlaps
        for c in 0..6 {
            urm_entries.push((9, c, 1.0));
        }
        let icm_entries = random_binary(&mut rng, 6, 4, 0.6);
        let urm = arc_matrix(10, 6, urm_entries);
        let icm = SparseMatrix::from_entries(6, 4, icm_entries).unwrap();
        let knn = KnnConfig {
            k: 3,
            h: 0.5,
            weighting: Weighting::None,
            normalize: true,
        };
        let pure = train_item_knn(&urm, &knn).unwrap();
        let hybrid = train_item_knn_cfcbf(
            &urm,
            &icm,
            &HybridConfig {
                knn,
                w: 1e-9,
            },
        )
        .unwrap();
        for t in 0..6 {
            assert_eq!(
                pure.similarity().unwrap().neighbors(t),
                hybrid.similarity().unwrap().neighbors(t),
                "target {t}"
            );
        }
    }

    #[test]
    fn cfcbf_matches_dense_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(25);
        let urm_entries = random_binary(&mut rng, 9, 7, 0.4);
        let icm_entries = random_binary(&mut rng, 7, 5, 0.5);
        let urm = arc_matrix(9, 7, urm_entries.clone());
        let icm = SparseMatrix::from_entries(7, 5, icm_entries.clone()).unwrap();
        let cfg = HybridConfig {
            knn: KnnConfig {
                k: 7,
                h: 0.0,
                weighting: Weighting::None,
                normalize: true,
            },
            w: 2.0,
        };
        let model = train_item_knn_cfcbf(&urm, &icm, &cfg).unwrap();
        let dense_urm = recbench_reference::dense_from_entries(9, 7, &urm_entries);
        let dense_icm = recbench_reference::dense_from_entries(7, 5, &icm_entries);
        let stacked = recbench_reference::stack_ratings_and_features(&dense_urm, &dense_icm, 2.0);
        let full = recbench_reference::cosine_full(&stacked, 0.0, true);
        let expected = recbench_reference::item_model_scores(&dense_urm, &full);
        for u in 0..9 {
            let got = model.score(u).unwrap();
            for i in 0..7 {
                assert_relative_eq!(got[i], expected[u][i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cfcbf_rejects_nonpositive_w() {
        let urm = arc_matrix(1, 1, vec![(0, 0, 1.0)]);
        let icm = SparseMatrix::from_entries(1, 1, vec![(0, 0, 1.0)]).unwrap();
        let cfg = HybridConfig {
            knn: KnnConfig::default(),
            w: 0.0,
        };
        assert!(matches!(
            train_item_knn_cfcbf(&urm, &icm, &cfg),
            Err(ModelError::InvalidConfig(_))
        ));
    }
}
