//! Gaussian-process surrogate with a Matérn-5/2 kernel and expected
//! improvement, over inputs normalized to the unit cube.

use nalgebra::{DMatrix, DVector};

const SQRT_5: f64 = 2.23606797749979;

/// Matérn 5/2 with per-dimension lengthscales and unit signal variance.
fn matern52(a: &[f64], b: &[f64], lengthscales: &[f64]) -> f64 {
    let mut r_sq = 0.0;
    for i in 0..a.len() {
        let d = (a[i] - b[i]) / lengthscales[i];
        r_sq += d * d;
    }
    let r = r_sq.sqrt();
    (1.0 + SQRT_5 * r + 5.0 / 3.0 * r_sq) * (-SQRT_5 * r).exp()
}

pub(crate) struct GpModel {
    x_train: Vec<Vec<f64>>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    alpha: DVector<f64>,
    lengthscales: Vec<f64>,
    /// Largest standardized observation (maximization target).
    pub(crate) best_standardized: f64,
}

/// Fits the surrogate to unit-cube inputs and raw objective values
/// (standardized internally). Returns `None` when the decomposition fails
/// even after escalating the noise jitter.
pub(crate) fn fit(x_train: &[Vec<f64>], y_train: &[f64], noise: f64) -> Option<GpModel> {
    let n = y_train.len();
    if n == 0 || x_train.is_empty() {
        return None;
    }
    let dims = x_train[0].len();
    let y_mean = y_train.iter().sum::<f64>() / n as f64;
    let y_var = y_train.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
    let y_std = y_var.sqrt().max(1e-12);
    let y_standardized: Vec<f64> = y_train.iter().map(|y| (y - y_mean) / y_std).collect();
    let best_standardized = y_standardized.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    // ARD lengthscales from the per-dimension spread of the inputs, clamped
    // away from zero so duplicate coordinates stay well conditioned.
    let lengthscales: Vec<f64> = (0..dims)
        .map(|d| {
            let mean = x_train.iter().map(|x| x[d]).sum::<f64>() / n as f64;
            let var = x_train.iter().map(|x| (x[d] - mean).powi(2)).sum::<f64>() / n as f64;
            var.sqrt().max(0.05)
        })
        .collect();

    let mut jitter = noise;
    for _ in 0..4 {
        let k = DMatrix::from_fn(n, n, |i, j| {
            let v = matern52(&x_train[i], &x_train[j], &lengthscales);
            if i == j {
                v + jitter
            } else {
                v
            }
        });
        if let Some(chol) = nalgebra::Cholesky::new(k) {
            let y_vec = DVector::from_column_slice(&y_standardized);
            let alpha = chol.solve(&y_vec);
            return Some(GpModel {
                x_train: x_train.to_vec(),
                chol,
                alpha,
                lengthscales,
                best_standardized,
            });
        }
        jitter *= 100.0;
    }
    None
}

impl GpModel {
    /// Posterior mean and standard deviation at `x`, in standardized units.
    pub(crate) fn predict(&self, x: &[f64]) -> (f64, f64) {
        let k_star = DVector::from_fn(self.x_train.len(), |i, _| {
            matern52(x, &self.x_train[i], &self.lengthscales)
        });
        let mean = k_star.dot(&self.alpha);
        let v = self.chol.solve(&k_star);
        let var = (1.0 - k_star.dot(&v)).max(0.0);
        (mean, var.sqrt())
    }
}

fn norm_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.3989422804014327;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Abramowitz & Stegun 7.1.26 erf approximation (absolute error < 1.5e-7).
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592 + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

fn norm_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// Expected improvement over `best` for a maximization problem.
pub(crate) fn expected_improvement(mean: f64, std: f64, best: f64) -> f64 {
    if std < 1e-12 {
        return (mean - best).max(0.0);
    }
    let z = (mean - best) / std;
    ((mean - best) * norm_cdf(z) + std * norm_pdf(z)).max(0.0)
}
