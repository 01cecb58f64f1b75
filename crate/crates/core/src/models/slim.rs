//! Sparse linear model: one elastic-net regression per item column with the
//! target column excluded (zero diagonal), solved by cyclic coordinate
//! descent with an active-set schedule.
//!
//! The objective per column y = r_i is
//! `1/(2n) ||y - X w||^2 + reg (l1_ratio ||w||_1 + (1 - l1_ratio)/2 ||w||^2)`
//! with n the number of users, matching the common per-sample (1/n) scaling
//! so the documented regularization ranges keep their meaning.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ModelError, ModelKind, TrainedModel};
use crate::similarity::SimilarityMatrix;
use crate::sparse::InteractionMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlimConfig {
    /// Share of l1 in the penalty, in [1e-5, 1].
    pub l1_ratio: f64,
    /// Overall regularization magnitude, in [1e-3, 1].
    pub reg_magnitude: f64,
    /// Constrain weights to be nonnegative (common SLIM practice).
    pub nonnegative: bool,
    /// Optional cap on the number of neighbors kept per learned column.
    pub topk: Option<usize>,
    /// Maximum coordinate-descent sweeps per column.
    pub max_iterations: usize,
    /// Sweep is converged when no coordinate moves by more than this.
    pub tolerance: f64,
}

impl Default for SlimConfig {
    fn default() -> Self {
        SlimConfig {
            l1_ratio: 0.1,
            reg_magnitude: 1e-3,
            nonnegative: true,
            topk: None,
            max_iterations: 100,
            tolerance: 1e-4,
        }
    }
}

impl SlimConfig {
    fn validate(&self) -> Result<(), ModelError> {
        if !(1e-5..=1.0).contains(&self.l1_ratio) {
            return Err(ModelError::InvalidConfig(format!(
                "l1_ratio must be in [1e-5, 1], got {}",
                self.l1_ratio
            )));
        }
        if !(1e-3..=1.0).contains(&self.reg_magnitude) {
            return Err(ModelError::InvalidConfig(format!(
                "reg_magnitude must be in [1e-3, 1], got {}",
                self.reg_magnitude
            )));
        }
        if self.max_iterations < 1 {
            return Err(ModelError::InvalidConfig(
                "max_iterations must be >= 1".into(),
            ));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(ModelError::InvalidConfig(format!(
                "tolerance must be finite and >= 0, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Training diagnostics; non-convergence is reported, not fatal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlimReport {
    pub total_columns: usize,
    pub non_converged_columns: usize,
    pub total_sweeps: u64,
    pub max_iterations: usize,
}

struct Scratch {
    residual: Vec<f64>,
    weights: Vec<f64>,
    seen: Vec<bool>,
}

/// One coordinate-descent sweep over `coords`; returns the largest absolute
/// weight change.
fn sweep(
    urm: &InteractionMatrix,
    coords: &[usize],
    sq_norms: &[f64],
    l1_pen: f64,
    l2_pen: f64,
    nonnegative: bool,
    weights: &mut [f64],
    residual: &mut [f64],
) -> f64 {
    let mut max_delta = 0.0f64;
    for &j in coords {
        let (rows, vals) = urm.col(j);
        let mut rho = 0.0;
        for (u, x) in rows.iter().zip(vals) {
            rho += x * residual[*u];
        }
        rho += sq_norms[j] * weights[j];
        let new = if nonnegative {
            (rho - l1_pen).max(0.0) / (sq_norms[j] + l2_pen)
        } else {
            rho.signum() * (rho.abs() - l1_pen).max(0.0) / (sq_norms[j] + l2_pen)
        };
        let delta = new - weights[j];
        if delta != 0.0 {
            for (u, x) in rows.iter().zip(vals) {
                residual[*u] -= delta * x;
            }
            weights[j] = new;
        }
        max_delta = max_delta.max(delta.abs());
    }
    max_delta
}

fn fit_column(
    urm: &InteractionMatrix,
    target: usize,
    cfg: &SlimConfig,
    sq_norms: &[f64],
    scratch: &mut Scratch,
) -> (Vec<(usize, f64)>, usize, bool) {
    let n_users = urm.n_rows();
    let l1_pen = cfg.reg_magnitude * cfg.l1_ratio * n_users as f64;
    let l2_pen = cfg.reg_magnitude * (1.0 - cfg.l1_ratio) * n_users as f64;

    // With nonnegative weights, columns that never co-occur with the target
    // can be skipped: their weight provably stays at zero.
    let mut candidates: Vec<usize> = if cfg.nonnegative {
        let mut c = Vec::new();
        for (u, _) in urm.col_iter(target) {
            for (j, _) in urm.row_iter(u) {
                if !scratch.seen[j] {
                    scratch.seen[j] = true;
                    c.push(j);
                }
            }
        }
        for &j in &c {
            scratch.seen[j] = false;
        }
        c.sort_unstable();
        c
    } else {
        (0..urm.n_cols()).collect()
    };
    candidates.retain(|&j| j != target && sq_norms[j] > 0.0);

    scratch.residual.fill(0.0);
    for (u, v) in urm.col_iter(target) {
        scratch.residual[u] = v;
    }

    let mut iterations = 0;
    let mut converged = false;
    'outer: while iterations < cfg.max_iterations {
        let delta = sweep(
            urm,
            &candidates,
            sq_norms,
            l1_pen,
            l2_pen,
            cfg.nonnegative,
            &mut scratch.weights,
            &mut scratch.residual,
        );
        iterations += 1;
        if delta <= cfg.tolerance {
            converged = true;
            break 'outer;
        }
        while iterations < cfg.max_iterations {
            let active: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&j| scratch.weights[j] != 0.0)
                .collect();
            if active.is_empty() {
                break;
            }
            let delta = sweep(
                urm,
                &active,
                sq_norms,
                l1_pen,
                l2_pen,
                cfg.nonnegative,
                &mut scratch.weights,
                &mut scratch.residual,
            );
            iterations += 1;
            if delta <= cfg.tolerance {
                break;
            }
        }
    }

    let mut row: Vec<(usize, f64)> = candidates
        .iter()
        .filter_map(|&j| {
            let w = scratch.weights[j];
            scratch.weights[j] = 0.0;
            (w != 0.0).then_some((j, w))
        })
        .collect();
    if let Some(k) = cfg.topk {
        row.sort_unstable_by(|a, b| {
            b.1.abs()
                .partial_cmp(&a.1.abs())
                .unwrap()
                .then(a.0.cmp(&b.0))
        });
        row.truncate(k);
        row.sort_unstable_by_key(|&(j, _)| j);
    }
    (row, iterations, converged)
}

/// Trains the sparse linear model; one elastic-net fit per item column,
/// columns run in parallel.
pub fn train_slim(
    urm: &Arc<InteractionMatrix>,
    cfg: &SlimConfig,
) -> Result<TrainedModel, ModelError> {
    cfg.validate()?;
    let n_items = urm.n_cols();
    let sq_norms: Vec<f64> = (0..n_items)
        .map(|j| {
            let (_, vals) = urm.col(j);
            vals.iter().map(|v| v * v).sum()
        })
        .collect();

    let fits: Vec<(Vec<(usize, f64)>, usize, bool)> = (0..n_items)
        .into_par_iter()
        .map_init(
            || Scratch {
                residual: vec![0.0; urm.n_rows()],
                weights: vec![0.0; n_items],
                seen: vec![false; n_items],
            },
            |scratch, target| fit_column(urm, target, cfg, &sq_norms, scratch),
        )
        .collect();

    let mut rows = Vec::with_capacity(n_items);
    let mut report = SlimReport {
        total_columns: n_items,
        non_converged_columns: 0,
        total_sweeps: 0,
        max_iterations: cfg.max_iterations,
    };
    for (row, iterations, converged) in fits {
        rows.push(row);
        report.total_sweeps += iterations as u64;
        if !converged {
            report.non_converged_columns += 1;
        }
    }

    let sim = SimilarityMatrix::from_rows(rows);
    let params = vec![
        ("l1_ratio".into(), cfg.l1_ratio.to_string()),
        ("reg_magnitude".into(), cfg.reg_magnitude.to_string()),
        ("nonnegative".into(), cfg.nonnegative.to_string()),
        (
            "topk".into(),
            cfg.topk.map_or("none".into(), |k| k.to_string()),
        ),
        ("max_iterations".into(), cfg.max_iterations.to_string()),
        ("tolerance".into(), cfg.tolerance.to_string()),
    ];
    Ok(TrainedModel::from_item_similarity(ModelKind::Slim, sim, Arc::clone(urm))?
        .with_params(params)
        .with_slim_report(report))
}
