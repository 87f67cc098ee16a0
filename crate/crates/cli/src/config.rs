//! Run configuration. Unknown keys are rejected and every scenario carries
//! its own seed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::scenarios;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Output directory, relative to the working directory.
    pub output_dir: String,
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Built-in scenario name.
    pub id: String,
    /// Output subdirectory; defaults to the id.
    #[serde(default)]
    pub name: Option<String>,
    pub seed: u64,
    pub diagnostics: Vec<String>,
    #[serde(default)]
    pub horizons: Horizons,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub params: Params,
}

/// Sequence length `n`, orbit-ball radius `l_max` and geodesic time `t_max`.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizons {
    pub n: Option<usize>,
    pub l_max: Option<usize>,
    pub t_max: Option<f64>,
}

/// Thresholds of the assertion checks; unset fields take scenario defaults.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Closed-form oracle agreement.
    pub exact: Option<f64>,
    /// Spectral exponent agreement.
    pub spectral: Option<f64>,
    /// Boundary fit agreement.
    pub boundary: Option<f64>,
    /// Largest accepted trend slope per step.
    pub trend: Option<f64>,
    /// Largest accepted diameter ratio under radius doubling.
    pub contraction: Option<f64>,
    /// Smallest accepted uniform-regularity tail minimum.
    pub uniform: Option<f64>,
    /// Largest accepted final Hausdorff distance.
    pub rescale: Option<f64>,
}

/// Scenario parameters.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Exponent of the graph domain.
    pub p: Option<f64>,
    /// Sample count of randomized or sampled diagnostics.
    pub samples: Option<usize>,
    /// Coxeter hull depth.
    pub depth: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let mut names = BTreeSet::new();
        for s in &self.scenarios {
            let spec = scenarios::lookup(&s.id)
                .ok_or_else(|| CliError::ConfigInvalid(format!("unknown scenario {:?}", s.id)))?;
            for d in &s.diagnostics {
                if !spec.diagnostics.contains(&d.as_str()) {
                    return Err(CliError::ConfigInvalid(format!(
                        "scenario {:?} has no diagnostic {:?} (available: {})",
                        s.id,
                        d,
                        spec.diagnostics.join(", ")
                    )));
                }
            }
            let name = s.output_name();
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(CliError::ConfigInvalid(format!("bad output name {name:?}")));
            }
            if !names.insert(name.to_string()) {
                return Err(CliError::ConfigInvalid(format!("duplicate output name {name:?}")));
            }
        }
        Ok(())
    }
}

impl ScenarioConfig {
    pub fn output_name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }
}
