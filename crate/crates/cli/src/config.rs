//! Experiment configuration, read from TOML. Every field has a default, so an
//! empty file is a valid configuration.

use std::path::{Path, PathBuf};

use cipa_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub table1: Table1Config,
    pub table2: Table2Config,
    pub convergence: ConvergenceConfig,
    pub distributed: DistributedConfig,
    pub denoise: DenoiseConfig,
    pub graph: GraphGenConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 20240901,
            out: PathBuf::from("out"),
            table1: Table1Config::default(),
            table2: Table2Config::default(),
            convergence: ConvergenceConfig::default(),
            distributed: DistributedConfig::default(),
            denoise: DenoiseConfig::default(),
            graph: GraphGenConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Config {
    pub max_degree: usize,
    /// Uniform points on `[0, 2]` used for the sup-norm.
    pub grid: usize,
    pub quadrature: usize,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            max_degree: 4,
            grid: 10001,
            quadrature: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table2Config {
    pub n: usize,
    pub generators: Vec<usize>,
    pub degree: usize,
    pub iters: usize,
    pub trials: usize,
}

impl Default for Table2Config {
    fn default() -> Self {
        Self {
            n: 1000,
            generators: vec![1, 2, 5],
            degree: 1,
            iters: 5,
            trials: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub n: usize,
    pub generators: Vec<usize>,
    pub degrees: Vec<usize>,
    pub iters: usize,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            generators: vec![1, 2, 5],
            degrees: vec![1, 2, 3, 4],
            iters: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistributedConfig {
    pub sizes: Vec<usize>,
    pub generators: Vec<usize>,
    pub degree: usize,
    pub iters: usize,
}

impl Default for DistributedConfig {
    fn default() -> Self {
        Self {
            sizes: vec![100, 500, 1000],
            generators: vec![1, 2, 5],
            degree: 2,
            iters: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoiseConfig {
    pub t_len: usize,
    pub n_points: usize,
    pub k: usize,
    pub smoothness: f64,
    pub fractions: Vec<f64>,
    pub gamma1: Vec<f64>,
    pub gamma2: Vec<f64>,
    pub solvers: Vec<String>,
    pub degree: usize,
    pub iters: usize,
    pub trials: usize,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        let grid: Vec<f64> = (0..=8).map(|k| 0.25 * k as f64).collect();
        Self {
            t_len: 30,
            n_points: 300,
            k: 5,
            smoothness: 10.0,
            fractions: vec![0.2],
            gamma1: grid.clone(),
            gamma2: grid,
            solvers: vec!["cipa".into(), "ogda".into(), "arma".into()],
            degree: 3,
            iters: 3,
            trials: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphGenConfig {
    /// `circulant`, `path` or `knn`.
    pub kind: String,
    pub n: usize,
    pub generators: Vec<usize>,
    pub k: usize,
    pub dim: usize,
}

impl Default for GraphGenConfig {
    fn default() -> Self {
        Self {
            kind: "circulant".into(),
            n: 1000,
            generators: vec![1, 2, 5],
            k: 5,
            dim: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Canonical serialization, used for manifests and hashing.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.table2.trials = 7;
        cfg.denoise.gamma1 = vec![0.0, 1.5];
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml("seed = 1\n[table2]\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }
}
