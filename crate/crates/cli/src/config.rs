//! JSON run configuration merged with command-line flags.

use std::path::{Path, PathBuf};

use ecoopt_core::preprocess::{OutlierAction, PipelineConfig};
use ecoopt_core::sensitivity::{default_weight_configs, LevelThresholds};
use ecoopt_core::{BoundsSet, LogBase, ModelCoefficients, SolverConfig, WeightConfig};
use serde::{Deserialize, Serialize};

use crate::args::GlobalArgs;
use crate::error::CliError;

pub const CONFIG_VERSION: &str = "1";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DELTA: f64 = 0.5;
pub const DEFAULT_OUT: &str = "out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledWeights {
    pub label: String,
    pub weights: WeightConfig,
}

/// Every field is optional; absent fields take their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub log_base: Option<LogBase>,
    pub weights: Option<WeightConfig>,
    pub coefficients: Option<ModelCoefficients>,
    pub bounds: Option<BoundsSet>,
    pub solver: Option<SolverConfig>,
    pub delta: Option<f64>,
    pub thresholds: Option<LevelThresholds>,
    pub weight_configs: Option<Vec<LabelledWeights>>,
    pub missing_fraction: Option<f64>,
    pub pipeline: Option<PipelineConfig>,
    pub data_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(v) = &cfg.version {
            if v != CONFIG_VERSION {
                return Err(CliError::Config(format!(
                    "unsupported config version '{v}', expected '{CONFIG_VERSION}'"
                )));
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub out: PathBuf,
    pub threads: usize,
    pub timestamp: bool,
    pub weights: WeightConfig,
    pub coefficients: ModelCoefficients,
    pub bounds: BoundsSet,
    pub solver: SolverConfig,
    pub delta: f64,
    pub thresholds: LevelThresholds,
    pub weight_configs: Vec<(String, WeightConfig)>,
    pub missing_fraction: Option<f64>,
    pub pipeline: PipelineConfig,
    pub data_dir: Option<PathBuf>,
}

/// Imputation only: experiments fit on raw source units.
pub fn default_pipeline() -> PipelineConfig {
    PipelineConfig {
        impute: true,
        scale: false,
        outlier_action: OutlierAction::Keep,
        interaction_pairs: Vec::new(),
        ..PipelineConfig::default()
    }
}

impl Settings {
    pub fn resolve(g: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &g.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let log_base = g
            .log_base
            .map(LogBase::from)
            .or(file.log_base)
            .unwrap_or_default();
        let coefficients = file.coefficients.unwrap_or_default().with_log_base(log_base);
        coefficients.validate()?;
        let bounds = file.bounds.unwrap_or_default();
        bounds.validate()?;
        let threads = g.threads.or(file.threads).unwrap_or(1);
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        Ok(Self {
            seed: g.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: g.out.clone().or(file.out).unwrap_or_else(|| DEFAULT_OUT.into()),
            threads,
            timestamp: !g.no_timestamp,
            weights: file.weights.unwrap_or_default(),
            coefficients,
            bounds,
            solver: file.solver.unwrap_or_default(),
            delta: file.delta.unwrap_or(DEFAULT_DELTA),
            thresholds: file.thresholds.unwrap_or_default(),
            weight_configs: match file.weight_configs {
                Some(v) => v.into_iter().map(|l| (l.label, l.weights)).collect(),
                None => default_weight_configs(),
            },
            missing_fraction: file.missing_fraction,
            pipeline: file.pipeline.unwrap_or_else(default_pipeline),
            data_dir: file.data_dir,
        })
    }
}
