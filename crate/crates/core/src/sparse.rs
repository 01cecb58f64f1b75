//! Sparse matrices with dual row/column traversal, plus the triple-based
//! builder used by the dataset loaders.
//!
//! A finalized [`SparseMatrix`] stores both a CSR and a CSC view so that
//! similarity kernels can walk rows and columns at equal cost. Matrices are
//! immutable after construction; transforms return new matrices.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SparseError {
    #[error("dataset is empty after preprocessing")]
    EmptyDataset,
    #[error("invalid binarize threshold {0}: must be > 0")]
    InvalidThreshold(f64),
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("negative value {value} at ({row}, {col})")]
    NegativeValue { row: usize, col: usize, value: f64 },
    #[error("index {index} out of range for dimension of size {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("dimension mismatch: {left} vs {right} ({context})")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },
}

/// Which dimension of a matrix an operation refers to. For an interaction
/// matrix, rows are users and columns are items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

/// Immutable sparse matrix holding strictly positive values, traversable in
/// both row-major and column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    // CSR view
    row_ptr: Vec<usize>,
    row_cols: Vec<usize>,
    row_vals: Vec<f64>,
    // CSC view
    col_ptr: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
}

/// User×item feedback matrix (r_ui); rows are users, columns are items.
pub type InteractionMatrix = SparseMatrix;

/// Item×feature content matrix (f_i); rows are items, columns are features.
pub type FeatureMatrix = SparseMatrix;

impl SparseMatrix {
    /// Builds a finalized matrix from coordinate entries.
    ///
    /// Entries with value exactly zero are dropped (zeros are structurally
    /// absent); negative values, duplicate coordinates and out-of-range
    /// indices are errors.
    pub fn from_entries(
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, SparseError> {
        let mut coo: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in entries {
            if r >= n_rows {
                return Err(SparseError::IndexOutOfRange {
                    index: r,
                    bound: n_rows,
                });
            }
            if c >= n_cols {
                return Err(SparseError::IndexOutOfRange {
                    index: c,
                    bound: n_cols,
                });
            }
            if v < 0.0 || !v.is_finite() {
                return Err(SparseError::NegativeValue {
                    row: r,
                    col: c,
                    value: v,
                });
            }
            if v > 0.0 {
                coo.push((r, c, v));
            }
        }
        coo.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in coo.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(SparseError::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }

        let nnz = coo.len();
        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut row_cols = Vec::with_capacity(nnz);
        let mut row_vals = Vec::with_capacity(nnz);
        for &(r, c, v) in &coo {
            row_ptr[r + 1] += 1;
            row_cols.push(c);
            row_vals.push(v);
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }

        // Counting sort into column-major order.
        let mut col_ptr = vec![0usize; n_cols + 1];
        for &(_, c, _) in &coo {
            col_ptr[c + 1] += 1;
        }
        for i in 0..n_cols {
            col_ptr[i + 1] += col_ptr[i];
        }
        let mut col_rows = vec![0usize; nnz];
        let mut col_vals = vec![0.0f64; nnz];
        let mut next = col_ptr.clone();
        for &(r, c, v) in &coo {
            let dst = next[c];
            col_rows[dst] = r;
            col_vals[dst] = v;
            next[c] += 1;
        }

        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            row_cols,
            row_vals,
            col_ptr,
            col_rows,
            col_vals,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.row_vals.len()
    }

    /// Column indices and values of row `r`, ascending by column.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.row_cols[s..e], &self.row_vals[s..e])
    }

    /// Row indices and values of column `c`, ascending by row.
    pub fn col(&self, c: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_ptr[c], self.col_ptr[c + 1]);
        (&self.col_rows[s..e], &self.col_vals[s..e])
    }

    pub fn row_iter(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (idx, vals) = self.row(r);
        idx.iter().copied().zip(vals.iter().copied())
    }

    pub fn col_iter(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (idx, vals) = self.col(c);
        idx.iter().copied().zip(vals.iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).ok().map(|i| vals[i])
    }

    /// Number of stored entries per row (`Axis::Rows`) or per column
    /// (`Axis::Cols`). For an interaction matrix these are N_u and N_i.
    pub fn degrees(&self, axis: Axis) -> Vec<usize> {
        match axis {
            Axis::Rows => (0..self.n_rows)
                .map(|r| self.row_ptr[r + 1] - self.row_ptr[r])
                .collect(),
            Axis::Cols => (0..self.n_cols)
                .map(|c| self.col_ptr[c + 1] - self.col_ptr[c])
                .collect(),
        }
    }

    /// Cheap transpose: swaps the two stored views.
    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: self.col_ptr.clone(),
            row_cols: self.col_rows.clone(),
            row_vals: self.col_vals.clone(),
            col_ptr: self.row_ptr.clone(),
            col_rows: self.row_cols.clone(),
            col_vals: self.row_vals.clone(),
        }
    }

    /// All stored entries in row-major order.
    pub fn to_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for r in 0..self.n_rows {
            for (c, v) in self.row_iter(r) {
                out.push((r, c, v));
            }
        }
        out
    }

    /// Returns a copy with every value multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> SparseMatrix {
        assert!(
            factor > 0.0 && factor.is_finite(),
            "scale factor must be positive and finite"
        );
        let mut m = self.clone();
        for v in &mut m.row_vals {
            *v *= factor;
        }
        for v in &mut m.col_vals {
            *v *= factor;
        }
        m
    }

    /// Stacks `self` on top of `other`; both must have the same column count.
    pub fn vstack(&self, other: &SparseMatrix) -> Result<SparseMatrix, SparseError> {
        if self.n_cols != other.n_cols {
            return Err(SparseError::DimensionMismatch {
                left: self.n_cols,
                right: other.n_cols,
                context: "vstack column counts",
            });
        }
        let mut entries = self.to_entries();
        entries.extend(
            other
                .to_entries()
                .into_iter()
                .map(|(r, c, v)| (r + self.n_rows, c, v)),
        );
        SparseMatrix::from_entries(self.n_rows + other.n_rows, self.n_cols, entries)
    }

    /// Dot products of column `target` against every column with overlapping
    /// support, ascending by column index. Columns with no overlap are absent.
    pub fn dot_products_with_column(
        &self,
        target: usize,
    ) -> Result<Vec<(usize, f64)>, SparseError> {
        if target >= self.n_cols {
            return Err(SparseError::IndexOutOfRange {
                index: target,
                bound: self.n_cols,
            });
        }
        let mut acc = vec![0.0f64; self.n_cols];
        let mut touched = Vec::new();
        for (r, v) in self.col_iter(target) {
            for (c, w) in self.row_iter(r) {
                if acc[c] == 0.0 && v * w != 0.0 {
                    touched.push(c);
                }
                acc[c] += v * w;
            }
        }
        touched.sort_unstable();
        Ok(touched.into_iter().map(|c| (c, acc[c])).collect())
    }
}

/// How to resolve repeated (user, item) coordinates in the raw triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DuplicatePolicy {
    /// Latest occurrence wins.
    #[default]
    KeepLast,
    /// Largest value wins (first such occurrence on ties).
    KeepMax,
    /// Values are summed; the timestamp of the last occurrence is kept.
    Sum,
}

/// One raw interaction record, already mapped to dense indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub user: usize,
    pub item: usize,
    pub value: f64,
    pub timestamp: Option<i64>,
}

/// Parsed rating triples with the id↔index dictionaries assigned in
/// first-appearance order.
#[derive(Debug, Clone, Default)]
pub struct RatingTriples {
    pub user_ids: Vec<String>,
    pub item_ids: Vec<String>,
    pub interactions: Vec<Interaction>,
}

impl RatingTriples {
    /// Builds triples from raw records, assigning indices in first-appearance
    /// order; the assignment is deterministic given the record order.
    pub fn from_records<I, U, T>(records: I) -> Self
    where
        I: IntoIterator<Item = (U, T, f64, Option<i64>)>,
        U: Into<String>,
        T: Into<String>,
    {
        let mut user_index: HashMap<String, usize> = HashMap::new();
        let mut item_index: HashMap<String, usize> = HashMap::new();
        let mut triples = RatingTriples::default();
        for (u, i, value, timestamp) in records {
            let u = u.into();
            let i = i.into();
            let user = *user_index.entry(u.clone()).or_insert_with(|| {
                triples.user_ids.push(u);
                triples.user_ids.len() - 1
            });
            let item = *item_index.entry(i.clone()).or_insert_with(|| {
                triples.item_ids.push(i);
                triples.item_ids.len() - 1
            });
            triples.interactions.push(Interaction {
                user,
                item,
                value,
                timestamp,
            });
        }
        triples
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_items(&self) -> usize {
        self.item_ids.len()
    }

    /// Resolves duplicate (user, item) coordinates per `policy`. Each
    /// surviving interaction keeps the list position of its first occurrence.
    pub fn deduplicate(&self, policy: DuplicatePolicy) -> RatingTriples {
        let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
        let mut kept: Vec<Interaction> = Vec::new();
        for it in &self.interactions {
            match slot.entry((it.user, it.item)) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(kept.len());
                    kept.push(*it);
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    let prev = &mut kept[*e.get()];
                    match policy {
                        DuplicatePolicy::KeepLast => {
                            prev.value = it.value;
                            prev.timestamp = it.timestamp;
                        }
                        DuplicatePolicy::KeepMax => {
                            if it.value > prev.value {
                                prev.value = it.value;
                                prev.timestamp = it.timestamp;
                            }
                        }
                        DuplicatePolicy::Sum => {
                            prev.value += it.value;
                            prev.timestamp = it.timestamp;
                        }
                    }
                }
            }
        }
        RatingTriples {
            user_ids: self.user_ids.clone(),
            item_ids: self.item_ids.clone(),
            interactions: kept,
        }
    }

    /// Timestamp per deduplicated (user, item) coordinate, for entries that
    /// carry one.
    pub fn timestamp_lookup(&self, policy: DuplicatePolicy) -> HashMap<(usize, usize), i64> {
        self.deduplicate(policy)
            .interactions
            .iter()
            .filter_map(|it| it.timestamp.map(|t| ((it.user, it.item), t)))
            .collect()
    }
}

/// Builds the interaction matrix from raw triples: duplicates are resolved
/// per `duplicate_policy`, then, if a threshold is given, values >= threshold
/// become 1 and the rest are dropped.
pub fn build_interaction_matrix(
    triples: &RatingTriples,
    binarize_threshold: Option<f64>,
    duplicate_policy: DuplicatePolicy,
) -> Result<InteractionMatrix, SparseError> {
    if triples.interactions.is_empty() {
        return Err(SparseError::EmptyDataset);
    }
    if let Some(t) = binarize_threshold {
        if t <= 0.0 || !t.is_finite() {
            return Err(SparseError::InvalidThreshold(t));
        }
    }
    let deduplicated = triples.deduplicate(duplicate_policy);
    let entries = deduplicated.interactions.iter().filter_map(|it| {
        let value = match binarize_threshold {
            Some(t) if it.value >= t => 1.0,
            Some(_) => return None,
            None => it.value,
        };
        Some((it.user, it.item, value))
    });
    let m = SparseMatrix::from_entries(triples.n_users(), triples.n_items(), entries)?;
    if m.nnz() == 0 {
        return Err(SparseError::EmptyDataset);
    }
    Ok(m)
}
