//! Baseline top-n recommenders and the machinery needed to benchmark them:
//! sparse matrix kernels, shrunk-cosine similarity, eight reference models,
//! splitting/ranking evaluation, sequential model-based hyper-parameter
//! search, and train/test split forensics.

pub mod diagnostics;
pub mod eval;
pub mod hpo;
pub mod models;
pub mod seeding;
pub mod similarity;
pub mod sparse;
