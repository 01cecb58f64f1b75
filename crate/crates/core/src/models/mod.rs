//! The baseline recommenders behind one uniform train/score/recommend
//! contract: TopPopular, the four KNN variants, the two random-walk models
//! and SLIM.
//!
//! A trained model is immutable; scoring different users concurrently against
//! the same model is safe. All ranking ties break toward the lower item index
//! so results are reproducible across platforms.

mod graph;
mod knn;
mod slim;

pub use graph::{train_p3alpha, train_rp3beta, GraphConfig, PopularityPenalty};
pub use knn::{
    train_item_knn, train_item_knn_cbf, train_item_knn_cfcbf, train_user_knn, HybridConfig,
};
pub use slim::{train_slim, SlimConfig, SlimReport};

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::similarity::{SimilarityError, SimilarityMatrix};
use crate::sparse::{Axis, InteractionMatrix};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {left} vs {right} ({context})")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },
    #[error("index {index} out of range for dimension of size {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    #[serde(rename = "toppop")]
    TopPop,
    #[serde(rename = "itemknn")]
    ItemKnn,
    #[serde(rename = "userknn")]
    UserKnn,
    #[serde(rename = "itemknn-cbf")]
    ItemKnnCbf,
    #[serde(rename = "itemknn-cfcbf")]
    ItemKnnCfCbf,
    #[serde(rename = "p3alpha")]
    P3Alpha,
    #[serde(rename = "rp3beta")]
    Rp3Beta,
    #[serde(rename = "slim")]
    Slim,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::TopPop,
        ModelKind::ItemKnn,
        ModelKind::UserKnn,
        ModelKind::ItemKnnCbf,
        ModelKind::ItemKnnCfCbf,
        ModelKind::P3Alpha,
        ModelKind::Rp3Beta,
        ModelKind::Slim,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::TopPop => "toppop",
            ModelKind::ItemKnn => "itemknn",
            ModelKind::UserKnn => "userknn",
            ModelKind::ItemKnnCbf => "itemknn-cbf",
            ModelKind::ItemKnnCfCbf => "itemknn-cfcbf",
            ModelKind::P3Alpha => "p3alpha",
            ModelKind::Rp3Beta => "rp3beta",
            ModelKind::Slim => "slim",
        }
    }

    pub fn parse(name: &str) -> Option<ModelKind> {
        ModelKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// True for models whose artifact is an item-item matrix scored as
    /// `profile × similarity`.
    pub fn is_item_based(&self) -> bool {
        !matches!(self, ModelKind::TopPop | ModelKind::UserKnn)
    }
}

#[derive(Debug)]
enum ModelArtifact {
    /// Per-item popularity scores, identical for every user.
    Popularity(Vec<f64>),
    /// Item-item weights; `by_source[j]` lists `(target, s)` for scatter
    /// scoring of `score[i] = sum_j r_uj * s_ij`.
    ItemWeights {
        sim: SimilarityMatrix,
        by_source: Vec<Vec<(usize, f64)>>,
    },
    /// User-user weights; `score[i] = sum_v s_uv * r_vi`.
    UserWeights(SimilarityMatrix),
}

/// A trained baseline exposing the uniform score-then-rank contract.
#[derive(Debug)]
pub struct TrainedModel {
    kind: ModelKind,
    artifact: ModelArtifact,
    train: Arc<InteractionMatrix>,
    params: Vec<(String, String)>,
    slim_report: Option<SlimReport>,
}

impl TrainedModel {
    pub fn from_popularity(
        popularity: Vec<f64>,
        train: Arc<InteractionMatrix>,
    ) -> Result<Self, ModelError> {
        if popularity.len() != train.n_cols() {
            return Err(ModelError::DimensionMismatch {
                left: popularity.len(),
                right: train.n_cols(),
                context: "popularity vector vs item count",
            });
        }
        Ok(TrainedModel {
            kind: ModelKind::TopPop,
            artifact: ModelArtifact::Popularity(popularity),
            train,
            params: Vec::new(),
            slim_report: None,
        })
    }

    pub fn from_item_similarity(
        kind: ModelKind,
        sim: SimilarityMatrix,
        train: Arc<InteractionMatrix>,
    ) -> Result<Self, ModelError> {
        if sim.n() != train.n_cols() {
            return Err(ModelError::DimensionMismatch {
                left: sim.n(),
                right: train.n_cols(),
                context: "item similarity size vs item count",
            });
        }
        let by_source = sim.transposed_rows();
        Ok(TrainedModel {
            kind,
            artifact: ModelArtifact::ItemWeights { sim, by_source },
            train,
            params: Vec::new(),
            slim_report: None,
        })
    }

    pub fn from_user_similarity(
        sim: SimilarityMatrix,
        train: Arc<InteractionMatrix>,
    ) -> Result<Self, ModelError> {
        if sim.n() != train.n_rows() {
            return Err(ModelError::DimensionMismatch {
                left: sim.n(),
                right: train.n_rows(),
                context: "user similarity size vs user count",
            });
        }
        Ok(TrainedModel {
            kind: ModelKind::UserKnn,
            artifact: ModelArtifact::UserWeights(sim),
            train,
            params: Vec::new(),
            slim_report: None,
        })
    }

    pub(crate) fn with_params(mut self, params: Vec<(String, String)>) -> Self {
        self.params = params;
        self
    }

    pub(crate) fn with_slim_report(mut self, report: SlimReport) -> Self {
        self.slim_report = Some(report);
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_users(&self) -> usize {
        self.train.n_rows()
    }

    pub fn n_items(&self) -> usize {
        self.train.n_cols()
    }

    pub fn train_matrix(&self) -> &Arc<InteractionMatrix> {
        &self.train
    }

    /// Hyper-parameters the model was trained with, as display strings.
    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    pub fn slim_report(&self) -> Option<&SlimReport> {
        self.slim_report.as_ref()
    }

    /// The similarity/weight artifact for similarity-backed models.
    pub fn similarity(&self) -> Option<&SimilarityMatrix> {
        match &self.artifact {
            ModelArtifact::ItemWeights { sim, .. } | ModelArtifact::UserWeights(sim) => Some(sim),
            ModelArtifact::Popularity(_) => None,
        }
    }

    pub fn popularity(&self) -> Option<&[f64]> {
        match &self.artifact {
            ModelArtifact::Popularity(p) => Some(p),
            _ => None,
        }
    }

    /// Scores every item for `user`; deterministic and finite.
    pub fn score(&self, user: usize) -> Result<Vec<f64>, ModelError> {
        if user >= self.train.n_rows() {
            return Err(ModelError::IndexOutOfRange {
                index: user,
                bound: self.train.n_rows(),
            });
        }
        let n_items = self.train.n_cols();
        let scores = match &self.artifact {
            ModelArtifact::Popularity(pop) => pop.clone(),
            ModelArtifact::ItemWeights { by_source, .. } => {
                let mut out = vec![0.0; n_items];
                for (j, v) in self.train.row_iter(user) {
                    for &(target, s) in &by_source[j] {
                        out[target] += v * s;
                    }
                }
                out
            }
            ModelArtifact::UserWeights(sim) => {
                let mut out = vec![0.0; n_items];
                for &(v, s) in sim.row(user) {
                    for (i, r) in self.train.row_iter(v) {
                        out[i] += s * r;
                    }
                }
                out
            }
        };
        Ok(scores)
    }

    /// Top-`cutoff` items by descending score, ties broken by lower index;
    /// the user's training items are removed first when `exclude_seen`.
    pub fn recommend(
        &self,
        user: usize,
        cutoff: usize,
        exclude_seen: bool,
    ) -> Result<Vec<usize>, ModelError> {
        if cutoff < 1 {
            return Err(ModelError::InvalidConfig("cutoff must be >= 1".into()));
        }
        let scores = self.score(user)?;
        let mut items: Vec<usize> = if exclude_seen {
            let (seen, _) = self.train.row(user);
            let mut seen_mask = vec![false; scores.len()];
            for &j in seen {
                seen_mask[j] = true;
            }
            (0..scores.len()).filter(|&i| !seen_mask[i]).collect()
        } else {
            (0..scores.len()).collect()
        };
        sort_desc_by_score(&mut items, &scores);
        items.truncate(cutoff);
        Ok(items)
    }
}

/// Sorts item indices by descending score, ties by ascending index.
pub(crate) fn sort_desc_by_score(items: &mut [usize], scores: &[f64]) {
    items.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
}

/// TopPopular: the score of item i for every user is its training degree N_i.
pub fn train_top_popular(urm: &Arc<InteractionMatrix>) -> Result<TrainedModel, ModelError> {
    let popularity: Vec<f64> = urm
        .degrees(Axis::Cols)
        .into_iter()
        .map(|d| d as f64)
        .collect();
    TrainedModel::from_popularity(popularity, Arc::clone(urm))
}
