//! Naive dense reference implementations of every scoring path in
//! `recbench-core`, used by the test suites as independent cross-checks.
//!
//! Everything here works on plain `Vec<Vec<f64>>` matrices and deliberately
//! shares no code with the optimized sparse kernels. Clarity over speed.

pub type Dense = Vec<Vec<f64>>;

/// Builds a dense row-major matrix from coordinate entries.
pub fn dense_from_entries(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> Dense {
    let mut m = vec![vec![0.0; n_cols]; n_rows];
    for &(r, c, v) in entries {
        m[r][c] = v;
    }
    m
}

/// Dot product of columns `a` and `b`.
pub fn column_dot(m: &Dense, a: usize, b: usize) -> f64 {
    let mut acc = 0.0;
    for row in m {
        acc += row[a] * row[b];
    }
    acc
}

/// Euclidean norm of column `c`.
pub fn column_norm(m: &Dense, c: usize) -> f64 {
    let mut acc = 0.0;
    for row in m {
        acc += row[c] * row[c];
    }
    acc.sqrt()
}

/// Number of nonzero entries in column `c`.
pub fn column_degree(m: &Dense, c: usize) -> usize {
    m.iter().filter(|row| row[c] != 0.0).count()
}

/// Number of nonzero entries in row `r`.
pub fn row_degree(m: &Dense, r: usize) -> usize {
    m[r].iter().filter(|v| **v != 0.0).count()
}

/// TF-IDF weighting with rows as documents: entry (d, t) becomes
/// value * ln(n_docs / df_t).
pub fn tfidf(m: &Dense) -> Dense {
    let n_docs = m.len() as f64;
    let n_cols = if m.is_empty() { 0 } else { m[0].len() };
    let mut out = m.clone();
    for t in 0..n_cols {
        let df = column_degree(m, t) as f64;
        let idf = if df > 0.0 { (n_docs / df).ln() } else { 0.0 };
        for (d, row) in m.iter().enumerate() {
            out[d][t] = if row[t] != 0.0 { row[t] * idf } else { 0.0 };
        }
    }
    out
}

/// Okapi BM25 weighting with rows as documents and row entry counts as
/// document lengths.
pub fn bm25(m: &Dense, k1: f64, b: f64) -> Dense {
    let n_docs = m.len() as f64;
    let n_cols = if m.is_empty() { 0 } else { m[0].len() };
    let total_nnz: usize = (0..m.len()).map(|r| row_degree(m, r)).sum();
    let avg_len = if n_docs > 0.0 { total_nnz as f64 / n_docs } else { 0.0 };
    let mut out = vec![vec![0.0; n_cols]; m.len()];
    for t in 0..n_cols {
        let df = column_degree(m, t) as f64;
        let idf = ((n_docs - df + 0.5) / (df + 0.5) + 1.0).ln();
        for (d, row) in m.iter().enumerate() {
            if row[t] != 0.0 {
                let len_d = row_degree(m, d) as f64;
                let tf = row[t] * (k1 + 1.0) / (row[t] + k1 * (1.0 - b + b * len_d / avg_len));
                out[d][t] = idf * tf;
            }
        }
    }
    out
}

/// Full shrunk-cosine similarity between all column pairs:
/// `s[i][j] = (c_i · c_j) / (||c_i|| ||c_j|| + h)` when `normalize`, else the
/// plain dot product. The diagonal is forced to zero (no self-similarity).
pub fn cosine_full(m: &Dense, h: f64, normalize: bool) -> Dense {
    let n_cols = if m.is_empty() { 0 } else { m[0].len() };
    let norms: Vec<f64> = (0..n_cols).map(|c| column_norm(m, c)).collect();
    let mut s = vec![vec![0.0; n_cols]; n_cols];
    for i in 0..n_cols {
        for j in 0..n_cols {
            if i == j {
                continue;
            }
            let dot = column_dot(m, i, j);
            if dot == 0.0 {
                continue;
            }
            s[i][j] = if normalize {
                dot / (norms[i] * norms[j] + h)
            } else {
                dot
            };
        }
    }
    s
}

/// Keeps, per target row, the `k` largest entries (ties broken by lower
/// column index) and zeroes the rest.
pub fn topk_truncate(s: &Dense, k: usize) -> Dense {
    let n = s.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut candidates: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != i && s[i][j] != 0.0)
            .map(|j| (j, s[i][j]))
            .collect();
        candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        for &(j, v) in candidates.iter().take(k) {
            out[i][j] = v;
        }
    }
    out
}

/// Three-step random-walk similarity: `s[i][j] = sum_v p_jv * p_vi` with
/// `p_vi = (r_vi / N_v)^alpha` and `p_jv = (r_vj / N_j)^alpha`; `i` is the
/// scored (destination) item and `j` the profile item. 0/0 is treated as 0.
pub fn p3alpha_full(urm: &Dense, alpha: f64) -> Dense {
    let n_users = urm.len();
    let n_items = if n_users == 0 { 0 } else { urm[0].len() };
    let user_deg: Vec<f64> = (0..n_users).map(|u| row_degree(urm, u) as f64).collect();
    let item_deg: Vec<f64> = (0..n_items).map(|i| column_degree(urm, i) as f64).collect();
    let pow = |x: f64| if x > 0.0 { x.powf(alpha) } else { 0.0 };
    let mut s = vec![vec![0.0; n_items]; n_items];
    for i in 0..n_items {
        for j in 0..n_items {
            if i == j {
                continue;
            }
            let mut acc = 0.0;
            for v in 0..n_users {
                if urm[v][j] != 0.0 && urm[v][i] != 0.0 {
                    let p_jv = pow(urm[v][j] / item_deg[j]);
                    let p_vi = pow(urm[v][i] / user_deg[v]);
                    acc += p_jv * p_vi;
                }
            }
            s[i][j] = acc;
        }
    }
    s
}

/// Divides every row `i` of the walk similarity by `N_i^beta` where `N_i` is
/// the destination item's popularity; rows of zero-degree items stay empty.
pub fn rp3beta_rescale(s: &Dense, urm: &Dense, beta: f64) -> Dense {
    let mut out = s.clone();
    for (i, row) in out.iter_mut().enumerate() {
        let deg = column_degree(urm, i) as f64;
        if deg > 0.0 {
            let penalty = deg.powf(beta);
            for v in row.iter_mut() {
                *v /= penalty;
            }
        }
    }
    out
}

/// Item-model scores: `score[u][i] = sum_j urm[u][j] * s[i][j]` with `s`
/// indexed target-major (rows are scored items).
pub fn item_model_scores(urm: &Dense, s: &Dense) -> Dense {
    let n_users = urm.len();
    let n_items = if n_users == 0 { 0 } else { urm[0].len() };
    let mut scores = vec![vec![0.0; n_items]; n_users];
    for u in 0..n_users {
        for i in 0..n_items {
            let mut acc = 0.0;
            for j in 0..n_items {
                acc += urm[u][j] * s[i][j];
            }
            scores[u][i] = acc;
        }
    }
    scores
}

/// User-model scores: `score[u][i] = sum_v s[u][v] * urm[v][i]`.
pub fn user_model_scores(urm: &Dense, s: &Dense) -> Dense {
    let n_users = urm.len();
    let n_items = if n_users == 0 { 0 } else { urm[0].len() };
    let mut scores = vec![vec![0.0; n_items]; n_users];
    for u in 0..n_users {
        for i in 0..n_items {
            let mut acc = 0.0;
            for v in 0..n_users {
                acc += s[u][v] * urm[v][i];
            }
            scores[u][i] = acc;
        }
    }
    scores
}

/// Vertical concatenation of the rating matrix and the scaled feature matrix
/// transpose, giving per-item columns `[r_i ; w * f_i]`.
pub fn stack_ratings_and_features(urm: &Dense, icm: &Dense, w: f64) -> Dense {
    let n_users = urm.len();
    let n_items = if n_users == 0 { 0 } else { urm[0].len() };
    let n_features = if icm.is_empty() { 0 } else { icm[0].len() };
    let mut out = vec![vec![0.0; n_items]; n_users + n_features];
    for u in 0..n_users {
        out[u].clone_from(&urm[u]);
    }
    for i in 0..n_items {
        for f in 0..n_features {
            out[n_users + f][i] = w * icm[i][f];
        }
    }
    out
}

/// Outcome of one naive elastic-net column fit.
pub struct SlimColumnFit {
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Naive dense coordinate descent for one elastic-net column of SLIM.
///
/// Minimizes `1/(2n) ||y - X w||^2 + reg * (l1_ratio ||w||_1 +
/// (1 - l1_ratio)/2 ||w||^2)` where `y` is column `target` of `urm`, `X` is
/// `urm` with that column excluded (weight pinned to zero), and `n` is the
/// number of rows. The schedule alternates one full cyclic sweep with sweeps
/// over the currently nonzero coordinates until the full sweep moves no
/// coordinate by more than `tolerance`; every sweep counts one iteration.
pub fn slim_column_naive(
    urm: &Dense,
    target: usize,
    l1_ratio: f64,
    reg: f64,
    nonnegative: bool,
    max_iterations: usize,
    tolerance: f64,
) -> SlimColumnFit {
    let n_users = urm.len();
    let n_items = if n_users == 0 { 0 } else { urm[0].len() };
    let n_scale = n_users as f64;
    let l1_pen = reg * l1_ratio * n_scale;
    let l2_pen = reg * (1.0 - l1_ratio) * n_scale;
    let sq_norms: Vec<f64> = (0..n_items)
        .map(|j| (0..n_users).map(|u| urm[u][j] * urm[u][j]).sum())
        .collect();

    let mut w = vec![0.0f64; n_items];
    let mut residual: Vec<f64> = (0..n_users).map(|u| urm[u][target]).collect();

    let mut sweep = |coords: &[usize], w: &mut Vec<f64>, residual: &mut Vec<f64>| -> f64 {
        let mut max_delta = 0.0f64;
        for &j in coords {
            if sq_norms[j] == 0.0 {
                continue;
            }
            let mut rho = 0.0;
            for u in 0..n_users {
                rho += urm[u][j] * residual[u];
            }
            rho += sq_norms[j] * w[j];
            let new = if nonnegative {
                (rho - l1_pen).max(0.0) / (sq_norms[j] + l2_pen)
            } else {
                rho.signum() * (rho.abs() - l1_pen).max(0.0) / (sq_norms[j] + l2_pen)
            };
            let delta = new - w[j];
            if delta != 0.0 {
                for u in 0..n_users {
                    residual[u] -= delta * urm[u][j];
                }
                w[j] = new;
            }
            max_delta = max_delta.max(delta.abs());
        }
        max_delta
    };

    let all: Vec<usize> = (0..n_items).filter(|&j| j != target).collect();
    let mut iterations = 0;
    let mut converged = false;
    'outer: while iterations < max_iterations {
        let delta = sweep(&all, &mut w, &mut residual);
        iterations += 1;
        if delta <= tolerance {
            converged = true;
            break 'outer;
        }
        while iterations < max_iterations {
            let active: Vec<usize> = all.iter().copied().filter(|&j| w[j] != 0.0).collect();
            if active.is_empty() {
                break;
            }
            let delta = sweep(&active, &mut w, &mut residual);
            iterations += 1;
            if delta <= tolerance {
                break;
            }
        }
    }

    SlimColumnFit {
        weights: w,
        iterations,
        converged,
    }
}

/// Full SLIM score matrix from per-column naive fits.
pub fn slim_scores(
    urm: &Dense,
    l1_ratio: f64,
    reg: f64,
    nonnegative: bool,
    max_iterations: usize,
    tolerance: f64,
) -> Dense {
    let n_items = if urm.is_empty() { 0 } else { urm[0].len() };
    let mut s = vec![vec![0.0; n_items]; n_items];
    for i in 0..n_items {
        let fit = slim_column_naive(urm, i, l1_ratio, reg, nonnegative, max_iterations, tolerance);
        for j in 0..n_items {
            s[i][j] = fit.weights[j];
        }
    }
    item_model_scores(urm, &s)
}
