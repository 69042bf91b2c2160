use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecoopt_core::{LogBase, WeightConfig};

#[derive(Debug, Parser)]
#[command(name = "ecoopt", version, about = "Multi-objective AI deployment optimization and experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed for every random draw.
    #[arg(long, global = true, env = "ECOOPT_SEED")]
    pub seed: Option<u64>,
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub log_base: Option<LogBaseArg>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Leave the timestamp out of the manifest.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "e")]
    E,
    #[value(name = "10")]
    Ten,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::E => LogBase::Natural,
            LogBaseArg::Ten => LogBase::Ten,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic datasets as CSV plus a manifest.
    GenData(GenDataArgs),
    /// Maximize the composite objective and compare with the corner oracle.
    Optimize(WeightArgs),
    /// Optimize under each weight configuration.
    Sweep,
    /// One-at-a-time parameter sensitivity at the optimum.
    Sensitivity(SensitivityArgs),
    /// Run one of the data experiments.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Generate every built-in dataset.
    #[arg(long, conflicts_with_all = ["dataset", "spec"])]
    pub all: bool,
    /// Built-in dataset to generate (repeatable).
    #[arg(long, value_parser = ["llm_energy", "sustainability", "renewable_market", "entrepreneurship"])]
    pub dataset: Vec<String>,
    /// JSON generator spec (one object or an array).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Fraction of numeric cells to blank after generation (at most 0.05).
    #[arg(long)]
    pub missing: Option<f64>,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// alpha,beta,gamma on the simplex.
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<WeightConfig>,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub weights: WeightArgs,
    /// Relative perturbation in (0, 1).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Skip the SVG chart.
    #[arg(long)]
    pub no_svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Baseline,
    Validate,
    Compare,
    Sectors,
    Countries,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Baseline => "baseline",
            ExperimentName::Validate => "validate",
            ExperimentName::Compare => "compare",
            ExperimentName::Sectors => "sectors",
            ExperimentName::Countries => "countries",
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    /// Directory holding previously generated CSVs; generated on the fly
    /// from the seed when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub weights: WeightArgs,
}

pub fn parse_weights(s: &str) -> Result<WeightConfig, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<_, _>>()?;
    let [a, b, g] = parts[..] else {
        return Err(format!("expected three comma-separated weights, got {}", parts.len()));
    };
    WeightConfig::new(a, b, g).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse() {
        let w = parse_weights("0.33, 0.33,0.34").unwrap();
        assert_eq!((w.alpha, w.beta, w.gamma), (0.33, 0.33, 0.34));
        assert!(parse_weights("0.5,0.6,0.1").unwrap_err().contains("sum to 1"));
        assert!(parse_weights("0.5,0.5").is_err());
        assert!(parse_weights("a,b,c").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
