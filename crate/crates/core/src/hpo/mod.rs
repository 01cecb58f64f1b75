//! Sequential model-based hyper-parameter search: a handful of seeded random
//! points, then expected-improvement proposals from a Gaussian-process
//! surrogate. 35 evaluations with 5 initial points by default.
//!
//! Studies are reproducible: the per-trial RNG streams derive from
//! (seed, trial index) alone, so a study resumed from its log continues
//! exactly where an uninterrupted run would have been.

mod gp;
mod space;

pub use space::{default_space, default_space_named, Dimension, DimensionKind, SearchSpace};

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeding;

#[derive(Debug, Error)]
pub enum HpoError {
    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("invalid study options: {0}")]
    InvalidOptions(String),
    #[error("corrupt study log {path}: {reason}")]
    CorruptLog { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One hyper-parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Cat(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Real(v) => Some(*v),
            ParamValue::Cat(_) => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Cat(s) => Some(s),
            _ => None,
        }
    }
}

/// A full configuration: dimension name to value, ordered by name.
pub type ParamConfig = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Smbo,
    Random,
}

/// One evaluated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub index: usize,
    pub config: ParamConfig,
    pub value: Option<f64>,
    pub error: Option<String>,
    pub duration: Duration,
}

/// The full search log plus the best trial.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub trials: Vec<Trial>,
    /// Index of the best successful trial (earliest on ties).
    pub best: Option<usize>,
    pub seed: u64,
    pub mode: SearchMode,
}

impl StudyResult {
    pub fn best_trial(&self) -> Option<&Trial> {
        self.best.map(|i| &self.trials[i])
    }
}

#[derive(Debug, Clone)]
pub struct StudyOptions {
    pub n_trials: usize,
    pub n_init: usize,
    pub seed: u64,
    pub mode: SearchMode,
    /// JSON-lines log, one trial per line; a pre-existing log resumes the
    /// study from where it stopped.
    pub log_path: Option<PathBuf>,
    /// Random candidates evaluated when maximizing expected improvement.
    pub n_candidates: usize,
    /// Observation-noise jitter on the surrogate's kernel diagonal.
    pub noise: f64,
}

impl StudyOptions {
    pub fn new(seed: u64) -> Self {
        StudyOptions {
            n_trials: 35,
            n_init: 5,
            seed,
            mode: SearchMode::Smbo,
            log_path: None,
            n_candidates: 512,
            noise: 1e-6,
        }
    }
}

/// Persisted form of one trial (durations and wall-clock timestamps are
/// deliberately absent so logs are byte-identical across reruns; the trial
/// index is the logical timestamp).
#[derive(Debug, Serialize, Deserialize)]
struct TrialRecord {
    trial: usize,
    config: ParamConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn load_log(path: &PathBuf, space: &SearchSpace, n_max: usize) -> Result<Vec<Trial>, HpoError> {
    let corrupt = |reason: String| HpoError::CorruptLog {
        path: path.display().to_string(),
        reason,
    };
    let content = fs::read_to_string(path)?;
    let mut trials = Vec::new();
    for (line_no, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TrialRecord = serde_json::from_str(line)
            .map_err(|e| corrupt(format!("line {}: {e}", line_no + 1)))?;
        if record.trial != trials.len() {
            return Err(corrupt(format!(
                "line {}: expected trial {}, found {}",
                line_no + 1,
                trials.len(),
                record.trial
            )));
        }
        if !space.contains(&record.config) {
            return Err(corrupt(format!(
                "line {}: configuration out of bounds",
                line_no + 1
            )));
        }
        trials.push(Trial {
            index: record.trial,
            config: record.config,
            value: record.value,
            error: record.error,
            duration: Duration::ZERO,
        });
    }
    if trials.len() > n_max {
        return Err(corrupt(format!(
            "log holds {} trials but the study asks for {}",
            trials.len(),
            n_max
        )));
    }
    Ok(trials)
}

/// Proposes the next configuration by maximizing expected improvement under
/// a GP fit to the successful trials; falls back to a uniform draw while
/// there is not enough data or if the fit fails.
fn propose_smbo(
    space: &SearchSpace,
    trials: &[Trial],
    rng: &mut ChaCha8Rng,
    opts: &StudyOptions,
) -> ParamConfig {
    let observed: Vec<(Vec<f64>, f64)> = trials
        .iter()
        .filter_map(|t| t.value.map(|v| (space.encode(&t.config), v)))
        .collect();
    if observed.len() < 2 {
        return space.sample(rng);
    }
    let x: Vec<Vec<f64>> = observed.iter().map(|(x, _)| x.clone()).collect();
    let y: Vec<f64> = observed.iter().map(|(_, v)| *v).collect();
    let Some(model) = gp::fit(&x, &y, opts.noise) else {
        return space.sample(rng);
    };
    let width = space.encoded_width();
    let mut best_ei = f64::NEG_INFINITY;
    let mut best_coords = vec![0.5; width];
    for _ in 0..opts.n_candidates {
        let coords = space.sample_encoded(rng);
        let (mean, std) = model.predict(&coords);
        let ei = gp::expected_improvement(mean, std, model.best_standardized);
        if ei > best_ei {
            best_ei = ei;
            best_coords = coords;
        }
    }
    space.decode(&best_coords)
}

/// Runs the study: `n_init` seeded uniform points, then expected-improvement
/// proposals (mode `Random` skips the surrogate entirely). Objective failures
/// are recorded per trial and the study continues. An empty space degenerates
/// to a single evaluation.
pub fn run_study<F>(
    mut objective: F,
    space: &SearchSpace,
    opts: &StudyOptions,
) -> Result<StudyResult, HpoError>
where
    F: FnMut(&ParamConfig) -> Result<f64, String>,
{
    if opts.n_init > opts.n_trials {
        return Err(HpoError::InvalidOptions(format!(
            "n_init {} exceeds n_trials {}",
            opts.n_init, opts.n_trials
        )));
    }
    if opts.n_trials == 0 {
        return Err(HpoError::InvalidOptions("n_trials must be >= 1".into()));
    }
    let n_effective = if space.dimensions().is_empty() {
        1
    } else {
        opts.n_trials
    };

    let mut trials = match &opts.log_path {
        Some(path) if path.exists() => load_log(path, space, n_effective)?,
        _ => Vec::new(),
    };
    let mut log_file = match &opts.log_path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            Some(fs::OpenOptions::new().create(true).append(true).open(path)?)
        }
        None => None,
    };

    while trials.len() < n_effective {
        let index = trials.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seeding::mix(opts.seed, index as u64));
        let config = if space.dimensions().is_empty() {
            ParamConfig::new()
        } else if index < opts.n_init || opts.mode == SearchMode::Random {
            space.sample(&mut rng)
        } else {
            propose_smbo(space, &trials, &mut rng, opts)
        };

        let started = Instant::now();
        let outcome = objective(&config);
        let duration = started.elapsed();
        let (value, error) = match outcome {
            Ok(v) if v.is_finite() => (Some(v), None),
            Ok(v) => (None, Some(format!("objective returned non-finite value {v}"))),
            Err(e) => (None, Some(e)),
        };

        if let Some(file) = log_file.as_mut() {
            let record = TrialRecord {
                trial: index,
                config: config.clone(),
                value,
                error: error.clone(),
            };
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
        }
        trials.push(Trial {
            index,
            config,
            value,
            error,
            duration,
        });
    }

    let best = trials
        .iter()
        .filter(|t| t.value.is_some())
        .max_by(|a, b| {
            a.value
                .unwrap()
                .total_cmp(&b.value.unwrap())
                .then(b.index.cmp(&a.index)) // earlier trial wins ties
        })
        .map(|t| t.index);
    Ok(StudyResult {
        trials,
        best,
        seed: opts.seed,
        mode: opts.mode,
    })
}
