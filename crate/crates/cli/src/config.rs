//! Run configuration: an optional JSON file, overridden field by field by flags.

use std::path::Path;

use anyhow::Context;
use grassmann_fock::distribution::{WeightConfig, WeightSystem};
use grassmann_fock::process::{ModelConfig, SpectralDensity};
use serde::Deserialize;

/// Contents of `--config`. Every field is optional; flags take precedence.
///
/// ```json
/// {
///   "seed": 42,
///   "samples": 1000,
///   "weights": {"phi": "linear", "lambda": 1.0, "G_max": 64},
///   "model": {"density": {"form": "power_law", "H": 0.7}, "n_max": 400, "U": 40.0, "M": 16384},
///   "p": 1
/// }
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub weights: Option<WeightConfig>,
    pub model: Option<ModelConfig>,
    /// Norm order `p` of `H_{-p}` used in convergence tables.
    pub p: Option<i32>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Weight system from the config, with `--g-max` applied on top.
    pub fn weights(&self, g_max: Option<u32>) -> grassmann_fock::Result<WeightSystem> {
        let mut cfg = self.weights.clone().unwrap_or_default();
        if let Some(g) = g_max {
            cfg.g_max = g;
        }
        WeightSystem::from_config(&cfg)
    }

    /// Model from the config with the density and `n_max` flags applied on top.
    /// Without either source the density defaults to Brownian motion.
    pub fn model(&self, density: Option<SpectralDensity>, n_max: Option<usize>) -> ModelConfig {
        let mut cfg = self.model.clone().unwrap_or_else(|| ModelConfig::new(SpectralDensity::Constant));
        if let Some(d) = density {
            cfg.density = d;
        }
        if let Some(n) = n_max {
            cfg.n_max = n;
        }
        cfg
    }
}
