//! Search-space definitions, unit-cube encoding, and the per-algorithm
//! default spaces.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{HpoError, ParamConfig, ParamValue};
use crate::models::ModelKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DimensionKind {
    RealUniform { low: f64, high: f64 },
    RealLogUniform { low: f64, high: f64 },
    IntegerUniform { low: i64, high: i64 },
    Categorical { choices: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    #[serde(flatten)]
    pub kind: DimensionKind,
}

/// Ordered list of dimensions. Integer dimensions are optimized continuously
/// and rounded; categorical dimensions are one-hot relaxed for the surrogate.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    dimensions: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dimensions: Vec<Dimension>) -> Result<Self, HpoError> {
        let mut names: Vec<&str> = dimensions.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != dimensions.len() {
            return Err(HpoError::InvalidSpace("duplicate dimension names".into()));
        }
        for d in &dimensions {
            match &d.kind {
                DimensionKind::RealUniform { low, high } => {
                    if !(low < high && low.is_finite() && high.is_finite()) {
                        return Err(HpoError::InvalidSpace(format!(
                            "dimension '{}': bounds must satisfy low < high",
                            d.name
                        )));
                    }
                }
                DimensionKind::RealLogUniform { low, high } => {
                    if !(*low > 0.0 && low < high && high.is_finite()) {
                        return Err(HpoError::InvalidSpace(format!(
                            "dimension '{}': log bounds must satisfy 0 < low < high",
                            d.name
                        )));
                    }
                }
                DimensionKind::IntegerUniform { low, high } => {
                    if low >= high {
                        return Err(HpoError::InvalidSpace(format!(
                            "dimension '{}': bounds must satisfy low < high",
                            d.name
                        )));
                    }
                }
                DimensionKind::Categorical { choices } => {
                    if choices.is_empty() {
                        return Err(HpoError::InvalidSpace(format!(
                            "dimension '{}': empty category set",
                            d.name
                        )));
                    }
                }
            }
        }
        Ok(SearchSpace { dimensions })
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    /// Width of the unit-cube encoding: one coordinate per numeric dimension,
    /// one per category of each categorical dimension.
    pub fn encoded_width(&self) -> usize {
        self.dimensions
            .iter()
            .map(|d| match &d.kind {
                DimensionKind::Categorical { choices } => choices.len(),
                _ => 1,
            })
            .sum()
    }

    /// Uniform draw in the native parameter space.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> ParamConfig {
        let mut config = ParamConfig::new();
        for d in &self.dimensions {
            let value = match &d.kind {
                DimensionKind::RealUniform { low, high } => {
                    ParamValue::Real(rng.random_range(*low..*high))
                }
                DimensionKind::RealLogUniform { low, high } => {
                    ParamValue::Real(rng.random_range(low.ln()..high.ln()).exp())
                }
                DimensionKind::IntegerUniform { low, high } => {
                    ParamValue::Int(rng.random_range(*low..=*high))
                }
                DimensionKind::Categorical { choices } => {
                    ParamValue::Cat(choices[rng.random_range(0..choices.len())].clone())
                }
            };
            config.insert(d.name.clone(), value);
        }
        config
    }

    /// Uniform draw directly in the unit cube.
    pub fn sample_encoded(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.encoded_width()).map(|_| rng.random::<f64>()).collect()
    }

    /// Maps a configuration into the unit cube (log transform for log
    /// dimensions, one-hot for categoricals).
    pub fn encode(&self, config: &ParamConfig) -> Vec<f64> {
        let mut coords = Vec::with_capacity(self.encoded_width());
        for d in &self.dimensions {
            let value = &config[&d.name];
            match &d.kind {
                DimensionKind::RealUniform { low, high } => {
                    coords.push((value.as_f64().unwrap() - low) / (high - low));
                }
                DimensionKind::RealLogUniform { low, high } => {
                    coords.push(
                        (value.as_f64().unwrap().ln() - low.ln()) / (high.ln() - low.ln()),
                    );
                }
                DimensionKind::IntegerUniform { low, high } => {
                    coords.push((value.as_i64().unwrap() - low) as f64 / (high - low) as f64);
                }
                DimensionKind::Categorical { choices } => {
                    let chosen = value.as_str().unwrap();
                    for c in choices {
                        coords.push(if c == chosen { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        coords
    }

    /// Maps unit-cube coordinates back to a configuration: integers rounded
    /// and clamped, categoricals by argmax (lowest index on ties).
    pub fn decode(&self, coords: &[f64]) -> ParamConfig {
        let mut config = ParamConfig::new();
        let mut pos = 0;
        for d in &self.dimensions {
            let value = match &d.kind {
                DimensionKind::RealUniform { low, high } => {
                    let v = (low + coords[pos] * (high - low)).clamp(*low, *high);
                    pos += 1;
                    ParamValue::Real(v)
                }
                DimensionKind::RealLogUniform { low, high } => {
                    let v = (low.ln() + coords[pos] * (high.ln() - low.ln()))
                        .exp()
                        .clamp(*low, *high);
                    pos += 1;
                    ParamValue::Real(v)
                }
                DimensionKind::IntegerUniform { low, high } => {
                    let raw = *low as f64 + coords[pos] * (high - low) as f64;
                    pos += 1;
                    ParamValue::Int((raw.round() as i64).clamp(*low, *high))
                }
                DimensionKind::Categorical { choices } => {
                    let slice = &coords[pos..pos + choices.len()];
                    let mut best = 0;
                    for (i, &v) in slice.iter().enumerate() {
                        if v > slice[best] {
                            best = i;
                        }
                    }
                    pos += choices.len();
                    ParamValue::Cat(choices[best].clone())
                }
            };
            config.insert(d.name.clone(), value);
        }
        config
    }

    /// Whether `config` has exactly the space's dimensions, within bounds.
    pub fn contains(&self, config: &ParamConfig) -> bool {
        if config.len() != self.dimensions.len() {
            return false;
        }
        self.dimensions.iter().all(|d| {
            config.get(&d.name).is_some_and(|v| match (&d.kind, v) {
                (DimensionKind::RealUniform { low, high }, ParamValue::Real(x)) => {
                    x >= low && x <= high
                }
                (DimensionKind::RealLogUniform { low, high }, ParamValue::Real(x)) => {
                    x >= low && x <= high
                }
                (DimensionKind::IntegerUniform { low, high }, ParamValue::Int(x)) => {
                    x >= low && x <= high
                }
                (DimensionKind::Categorical { choices }, ParamValue::Cat(c)) => {
                    choices.contains(c)
                }
                _ => false,
            })
        })
    }
}

fn knn_dimensions() -> Vec<Dimension> {
    vec![
        Dimension {
            name: "k".into(),
            kind: DimensionKind::IntegerUniform { low: 5, high: 800 },
        },
        Dimension {
            name: "h".into(),
            kind: DimensionKind::RealUniform { low: 0.0, high: 1000.0 },
        },
        Dimension {
            name: "weighting".into(),
            kind: DimensionKind::Categorical {
                choices: vec!["none".into(), "tfidf".into(), "bm25".into()],
            },
        },
        Dimension {
            name: "normalize".into(),
            kind: DimensionKind::Categorical {
                choices: vec!["true".into(), "false".into()],
            },
        },
    ]
}

/// The documented search space of each baseline: k in [5, 800], h in
/// [0, 1000], walk exponents in [0, 2], hybrid feature weight log-uniform in
/// [1e-2, 1e2], SLIM penalties log-uniform in [1e-5, 1] and [1e-3, 1].
pub fn default_space(kind: ModelKind) -> SearchSpace {
    let dims = match kind {
        ModelKind::TopPop => vec![],
        ModelKind::ItemKnn | ModelKind::UserKnn | ModelKind::ItemKnnCbf => knn_dimensions(),
        ModelKind::ItemKnnCfCbf => {
            let mut dims = knn_dimensions();
            dims.push(Dimension {
                name: "w".into(),
                kind: DimensionKind::RealLogUniform { low: 1e-2, high: 1e2 },
            });
            dims
        }
        ModelKind::P3Alpha => vec![
            Dimension {
                name: "k".into(),
                kind: DimensionKind::IntegerUniform { low: 5, high: 800 },
            },
            Dimension {
                name: "alpha".into(),
                kind: DimensionKind::RealUniform { low: 0.0, high: 2.0 },
            },
        ],
        ModelKind::Rp3Beta => vec![
            Dimension {
                name: "k".into(),
                kind: DimensionKind::IntegerUniform { low: 5, high: 800 },
            },
            Dimension {
                name: "alpha".into(),
                kind: DimensionKind::RealUniform { low: 0.0, high: 2.0 },
            },
            Dimension {
                name: "beta".into(),
                kind: DimensionKind::RealUniform { low: 0.0, high: 2.0 },
            },
        ],
        ModelKind::Slim => vec![
            Dimension {
                name: "l1_ratio".into(),
                kind: DimensionKind::RealLogUniform { low: 1e-5, high: 1.0 },
            },
            Dimension {
                name: "reg_magnitude".into(),
                kind: DimensionKind::RealLogUniform { low: 1e-3, high: 1.0 },
            },
        ],
    };
    SearchSpace::new(dims).expect("default spaces are valid")
}

/// String-keyed variant for config-driven callers.
pub fn default_space_named(name: &str) -> Result<SearchSpace, HpoError> {
    ModelKind::parse(name)
        .map(default_space)
        .ok_or_else(|| HpoError::UnknownAlgorithm(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn default_space_shapes() {
        assert_eq!(default_space(ModelKind::ItemKnn).dimensions().len(), 4);
        assert_eq!(default_space(ModelKind::UserKnn).dimensions().len(), 4);
        assert_eq!(default_space(ModelKind::ItemKnnCfCbf).dimensions().len(), 5);
        assert_eq!(default_space(ModelKind::P3Alpha).dimensions().len(), 2);
        assert_eq!(default_space(ModelKind::Rp3Beta).dimensions().len(), 3);
        assert!(default_space(ModelKind::TopPop).dimensions().is_empty());
        let slim = default_space(ModelKind::Slim);
        assert_eq!(slim.dimensions().len(), 2);
        assert!(matches!(
            slim.dimensions()[0].kind,
            DimensionKind::RealLogUniform { low, high } if low == 1e-5 && high == 1.0
        ));
        assert!(matches!(
            slim.dimensions()[1].kind,
            DimensionKind::RealLogUniform { low, high } if low == 1e-3 && high == 1.0
        ));
    }

    #[test]
    fn unknown_algorithm_rejected() {
        assert!(matches!(
            default_space_named("deepnet"),
            Err(HpoError::UnknownAlgorithm(_))
        ));
        assert!(default_space_named("rp3beta").is_ok());
    }

    #[test]
    fn encode_decode_roundtrip() {
        let space = default_space(ModelKind::ItemKnnCfCbf);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let config = space.sample(&mut rng);
            assert!(space.contains(&config));
            let decoded = space.decode(&space.encode(&config));
            // integers and categoricals round-trip exactly
            assert_eq!(decoded["k"].as_i64(), config["k"].as_i64());
            assert_eq!(decoded["weighting"], config["weighting"]);
            let h = config["h"].as_f64().unwrap();
            let h2 = decoded["h"].as_f64().unwrap();
            assert!((h - h2).abs() < 1e-9 * h.abs().max(1.0));
            let w = config["w"].as_f64().unwrap();
            let w2 = decoded["w"].as_f64().unwrap();
            assert!((w.ln() - w2.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_spaces_rejected() {
        assert!(SearchSpace::new(vec![Dimension {
            name: "x".into(),
            kind: DimensionKind::RealUniform { low: 1.0, high: 0.0 },
        }])
        .is_err());
        assert!(SearchSpace::new(vec![Dimension {
            name: "x".into(),
            kind: DimensionKind::RealLogUniform { low: 0.0, high: 1.0 },
        }])
        .is_err());
        assert!(SearchSpace::new(vec![
            Dimension {
                name: "x".into(),
                kind: DimensionKind::RealUniform { low: 0.0, high: 1.0 },
            },
            Dimension {
                name: "x".into(),
                kind: DimensionKind::RealUniform { low: 0.0, high: 1.0 },
            },
        ])
        .is_err());
    }
}
