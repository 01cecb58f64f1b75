//! Data splitting, negative sampling, ranking metrics and the per-user
//! evaluation loop.

mod evaluate;
mod metrics;
mod negatives;
mod split;

pub use evaluate::evaluate_model;
pub use metrics::{compute_metrics, Metric, MetricTable, MetricValues};
pub use negatives::{sample_negatives, NegativeSampleSet, UserCandidates};
pub use split::{
    split_leave_one_out, split_random_holdout, split_random_holdout_exact, LeaveOneOutMode,
    SplitMethod, SplitPair,
};

use thiserror::Error;

use crate::models::ModelError;
use crate::sparse::SparseError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("holdout ratio {0} must be strictly between 0 and 1")]
    InvalidRatio(f64),
    #[error("leave-one-out by timestamp requires timestamps on every interaction")]
    MissingTimestamps,
    #[error("negative sample count must be >= 1")]
    InvalidNegativeCount,
    #[error("relevant set must not be empty")]
    EmptyRelevantSet,
    #[error("no user has test interactions")]
    NoTestUsers,
    #[error("dimension mismatch: {left} vs {right} ({context})")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
