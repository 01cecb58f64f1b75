//! Shrunk-cosine top-k similarity with optional TF-IDF / BM25 weighting —
//! the kernel behind every KNN baseline.
//!
//! `cosine_topk` compares the *columns* of its input; weighting operators
//! treat *rows* as documents (users for collaborative models, items for
//! content models), so callers whose document axis differs weight first and
//! pass `Weighting::None` in the config.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sparse::{Axis, SparseMatrix};

pub const BM25_DEFAULT_K1: f64 = 1.2;
pub const BM25_DEFAULT_B: f64 = 0.75;

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("invalid knn config: {0}")]
    InvalidConfig(String),
}

/// Matrix weighting applied before the cosine kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    #[default]
    None,
    TfIdf,
    Bm25,
}

/// Configuration of the shrunk-cosine KNN kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    /// Neighborhood size; at least 1.
    pub k: usize,
    /// Shrink term h >= 0, damping similarities of low-support pairs.
    pub h: f64,
    pub weighting: Weighting,
    /// When false the kernel is the plain dot product and `h` is ignored
    /// (the shrink is only meaningful against a norm denominator).
    pub normalize: bool,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            k: 100,
            h: 0.0,
            weighting: Weighting::None,
            normalize: true,
        }
    }
}

impl KnnConfig {
    fn validate(&self) -> Result<(), SimilarityError> {
        if self.k < 1 {
            return Err(SimilarityError::InvalidConfig("k must be >= 1".into()));
        }
        if !(self.h >= 0.0 && self.h.is_finite()) {
            return Err(SimilarityError::InvalidConfig(format!(
                "shrink h must be finite and >= 0, got {}",
                self.h
            )));
        }
        Ok(())
    }
}

/// Sparse top-k similarity: `rows[target]` holds up to k `(neighbor, s)`
/// pairs sorted by neighbor index, never including the target itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SimilarityMatrix {
    pub(crate) fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        SimilarityMatrix { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, target: usize) -> &[(usize, f64)] {
        &self.rows[target]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Neighbor indices of `target`, ascending.
    pub fn neighbors(&self, target: usize) -> Vec<usize> {
        self.rows[target].iter().map(|&(j, _)| j).collect()
    }

    /// Similarity of `(target, neighbor)` if stored.
    pub fn get(&self, target: usize, neighbor: usize) -> Option<f64> {
        self.rows[target]
            .binary_search_by_key(&neighbor, |&(j, _)| j)
            .ok()
            .map(|i| self.rows[target][i].1)
    }

    /// Inverted view: `out[source]` lists `(target, s)` pairs, ascending by
    /// target. Used for scatter-style scoring.
    pub fn transposed_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.n];
        for (target, row) in self.rows.iter().enumerate() {
            for &(source, s) in row {
                out[source].push((target, s));
            }
        }
        out
    }
}

/// TF-IDF weighting with rows as documents: entry (d, t) becomes
/// `value * ln(n_docs / df_t)`. Columns present in every row weight to zero
/// and are dropped.
pub fn apply_tfidf(m: &SparseMatrix) -> SparseMatrix {
    let n_docs = m.n_rows() as f64;
    let idf: Vec<f64> = m
        .degrees(Axis::Cols)
        .into_iter()
        .map(|df| if df > 0 { (n_docs / df as f64).ln() } else { 0.0 })
        .collect();
    let entries = m
        .to_entries()
        .into_iter()
        .map(|(r, c, v)| (r, c, v * idf[c]));
    SparseMatrix::from_entries(m.n_rows(), m.n_cols(), entries)
        .expect("reweighting preserves structure")
}

/// Okapi BM25 weighting with rows as documents and row entry counts as
/// document lengths: entry (d, t) becomes
/// `idf_t * v (k1+1) / (v + k1 (1 - b + b len_d / avg_len))` with
/// `idf_t = ln((n_docs - df_t + 0.5) / (df_t + 0.5) + 1)`.
pub fn apply_bm25(m: &SparseMatrix, k1: f64, b: f64) -> SparseMatrix {
    let n_docs = m.n_rows() as f64;
    let lengths = m.degrees(Axis::Rows);
    let avg_len = if m.n_rows() > 0 {
        m.nnz() as f64 / n_docs
    } else {
        0.0
    };
    let idf: Vec<f64> = m
        .degrees(Axis::Cols)
        .into_iter()
        .map(|df| ((n_docs - df as f64 + 0.5) / (df as f64 + 0.5) + 1.0).ln())
        .collect();
    let entries = m.to_entries().into_iter().map(|(r, c, v)| {
        let norm_len = 1.0 - b + b * lengths[r] as f64 / avg_len;
        (r, c, idf[c] * v * (k1 + 1.0) / (v + k1 * norm_len))
    });
    SparseMatrix::from_entries(m.n_rows(), m.n_cols(), entries)
        .expect("reweighting preserves structure")
}

/// Applies the chosen weighting scheme with rows as documents; `None` copies.
pub fn apply_weighting(m: &SparseMatrix, weighting: Weighting) -> SparseMatrix {
    match weighting {
        Weighting::None => m.clone(),
        Weighting::TfIdf => apply_tfidf(m),
        Weighting::Bm25 => apply_bm25(m, BM25_DEFAULT_K1, BM25_DEFAULT_B),
    }
}

/// Shrunk-cosine top-k similarity between the columns of `m`.
///
/// With `normalize`, `s_ij = (c_i · c_j) / (||c_i|| ||c_j|| + h)`; otherwise
/// the plain dot product. Per target the k largest similarities are kept,
/// ties broken by lower neighbor index; self-similarity is always excluded.
pub fn cosine_topk(m: &SparseMatrix, cfg: &KnnConfig) -> Result<SimilarityMatrix, SimilarityError> {
    cfg.validate()?;
    let weighted;
    let m = match cfg.weighting {
        Weighting::None => m,
        Weighting::TfIdf => {
            weighted = apply_tfidf(m);
            &weighted
        }
        Weighting::Bm25 => {
            weighted = apply_bm25(m, BM25_DEFAULT_K1, BM25_DEFAULT_B);
            &weighted
        }
    };

    let n = m.n_cols();
    let norms: Vec<f64> = (0..n)
        .map(|c| {
            let (_, vals) = m.col(c);
            vals.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();

    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], Vec::<usize>::new()),
            |(acc, touched), target| {
                for (r, v) in m.col_iter(target) {
                    for (j, w) in m.row_iter(r) {
                        if acc[j] == 0.0 {
                            touched.push(j);
                        }
                        acc[j] += v * w;
                    }
                }
                let mut candidates: Vec<(usize, f64)> = Vec::with_capacity(touched.len());
                for &j in touched.iter() {
                    let dot = acc[j];
                    acc[j] = 0.0;
                    if j == target || dot == 0.0 {
                        continue;
                    }
                    let s = if cfg.normalize {
                        dot / (norms[target] * norms[j] + cfg.h)
                    } else {
                        dot
                    };
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

    Ok(SimilarityMatrix::from_rows(rows))
}
