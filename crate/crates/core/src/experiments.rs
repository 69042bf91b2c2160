//! Experiment drivers: descriptive baselines, surrogate validation, model
//! comparison and sector/country aggregation over generated tables.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{self, SpecError, YEAR_COLUMN};
use crate::model::{
    component_scores, BoundsSet, DeploymentStrategy, ModelCoefficients, ModelError, Variable,
    WeightConfig,
};
use crate::seed::derive_seeds;
use crate::stats::{self, StatsError, Summary, TTestResult};
use crate::surrogate::{
    cross_validate, BoostingParams, CvResult, ForestParams, ModelSpec, RegressionMetrics,
    SurrogateError,
};
use crate::table::{ColumnKind, DataTable, TableError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error("row {row}: column '{column}' is missing")]
    MissingValue { column: String, row: usize },
}

/// Relative noise added to surrogate targets, as a fraction of each
/// target's standard deviation.
pub const TARGET_NOISE: f64 = 0.01;
pub const CV_FOLDS: usize = 5;

/// Source column for each deployment variable and the map into model units.
pub const FEATURE_MAP: [(&str, Variable); 9] = [
    ("ai_readiness_index", Variable::AiAdoption),
    ("renewable_energy_pct", Variable::RenewableEnergy),
    ("energy_efficiency_index", Variable::EfficiencyGain),
    ("innovation_index", Variable::InnovationIndex),
    ("regulatory_quality", Variable::MarketStability),
    ("ai_investment_per_capita", Variable::AiInvestment),
    ("energy_consumption", Variable::EnergyConsumption),
    ("carbon_emissions", Variable::CarbonEmissions),
    ("water_usage", Variable::WaterUsage),
];

fn to_model_units(v: Variable, raw: f64) -> f64 {
    match v {
        Variable::AiAdoption => raw / 10.0,
        Variable::EfficiencyGain => raw * 0.8,
        Variable::MarketStability => 1.0 + 9.0 * (raw + 2.5) / 5.0,
        _ => raw,
    }
}

/// Maps one sustainability-table row to a strategy, clamped to `b`.
pub fn strategy_from_row(
    t: &DataTable,
    row: usize,
    b: &BoundsSet,
) -> Result<DeploymentStrategy, ExperimentError> {
    let mut x = [0.0; Variable::COUNT];
    for (col, v) in FEATURE_MAP {
        let j = t.column_index(col)?;
        let raw = t.get(row, j).as_f64().ok_or_else(|| ExperimentError::MissingValue {
            column: col.to_string(),
            row,
        })?;
        x[v.index()] = b.get(v).clamp(to_model_units(v, raw));
    }
    Ok(DeploymentStrategy::from_array(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateData {
    pub feature_names: Vec<String>,
    /// Rows × features in source units.
    pub features: DMatrix<f64>,
    pub sustainability: Vec<f64>,
    pub resilience: Vec<f64>,
    pub environmental: Vec<f64>,
    pub composite: Vec<f64>,
    /// Noise-free composite objective.
    pub composite_exact: Vec<f64>,
}

impl SurrogateData {
    pub fn targets(&self) -> [(&'static str, &[f64]); 4] {
        [
            ("sustainability", &self.sustainability),
            ("resilience", &self.resilience),
            ("environmental", &self.environmental),
            ("composite", &self.composite),
        ]
    }
}

fn add_noise(v: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sd = TARGET_NOISE * stats::population_std(v);
    if sd == 0.0 {
        return v.to_vec();
    }
    let normal = Normal::new(0.0, sd).expect("finite positive std");
    v.iter().map(|x| x + normal.sample(rng)).collect()
}

/// Features are the nine source columns; targets are the model components
/// at the mapped strategy plus Gaussian noise.
pub fn surrogate_data(
    t: &DataTable,
    w: &WeightConfig,
    c: &ModelCoefficients,
    b: &BoundsSet,
    seed: u64,
) -> Result<SurrogateData, ExperimentError> {
    let n = t.n_rows();
    let mut features = DMatrix::zeros(n, FEATURE_MAP.len());
    let (mut s, mut r, mut e, mut f) = (vec![], vec![], vec![], vec![]);
    for i in 0..n {
        let x = strategy_from_row(t, i, b)?;
        for (j, (col, _)) in FEATURE_MAP.iter().enumerate() {
            features[(i, j)] = t.get(i, t.column_index(col)?).as_f64().unwrap_or_default();
        }
        let scores = component_scores(&x, c)?;
        s.push(scores.sustainability);
        r.push(scores.resilience);
        e.push(scores.environmental);
        f.push(scores.combine(w));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SurrogateData {
        feature_names: FEATURE_MAP.iter().map(|(c, _)| c.to_string()).collect(),
        features,
        sustainability: add_noise(&s, &mut rng),
        resilience: add_noise(&r, &mut rng),
        environmental: add_noise(&e, &mut rng),
        composite: add_noise(&f, &mut rng),
        composite_exact: f,
    })
}

/// Model line-up for validation and comparison, seeded from `seed`.
pub fn model_specs(seed: u64) -> [ModelSpec; 3] {
    let s = derive_seeds(seed, 2);
    [
        ModelSpec::Linear,
        ModelSpec::Forest {
            params: ForestParams::default(),
            seed: s[0],
        },
        ModelSpec::Boosting {
            params: BoostingParams::default(),
            seed: s[1],
        },
    ]
}


// ---- baseline ------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub dataset: String,
    pub column: String,
    pub summary: Summary,
    pub missing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub a: String,
    pub b: String,
    pub target: f64,
    pub r: f64,
    pub interpretation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub metric: String,
    pub first_year: i32,
    pub first_year_mean: f64,
    pub last_year: i32,
    pub last_year_mean: f64,
    pub target_slope: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub summaries: Vec<ColumnSummary>,
    pub correlations: Vec<CorrelationRow>,
    pub trends: Vec<TrendRow>,
}

pub fn interpret_correlation(r: f64) -> String {
    let strength = match r.abs() {
        a if a >= 0.7 => "Strong",
        a if a >= 0.4 => "Moderate",
        a if a >= 0.2 => "Weak",
        _ => "Negligible",
    };
    let sign = if r >= 0.0 { "positive" } else { "negative" };
    format!("{strength} {sign}")
}

pub fn summarize_table(t: &DataTable) -> Vec<ColumnSummary> {
    t.columns()
        .iter()
        .filter(|c| c.kind == ColumnKind::Numeric && c.name != YEAR_COLUMN)
        .filter_map(|c| {
            let cells = t.numeric(&c.name).ok()?;
            let observed: Vec<f64> = cells.iter().flatten().copied().collect();
            Some(ColumnSummary {
                dataset: t.name.clone(),
                column: c.name.clone(),
                summary: stats::summarize(&observed)?,
                missing: cells.len() - observed.len(),
            })
        })
        .collect()
}

/// Complete (both present) pairs of two numeric columns.
fn paired_columns(t: &DataTable, a: &str, b: &str) -> Result<(Vec<f64>, Vec<f64>), ExperimentError> {
    let (x, y) = (t.numeric(a)?, t.numeric(b)?);
    Ok(x.into_iter()
        .zip(y)
        .filter_map(|(u, v)| Some((u?, v?)))
        .unzip())
}

/// Descriptive statistics of every table plus the correlation and trend
/// checks of the sustainability table against its generator spec.
pub fn baseline(
    tables: &[DataTable],
    sustainability: &datagen::GeneratorSpec,
) -> Result<BaselineReport, ExperimentError> {
    let summaries = tables.iter().flat_map(summarize_table).collect();
    let t = tables
        .iter()
        .find(|t| t.name == sustainability.name)
        .ok_or_else(|| TableError::UnknownColumn(sustainability.name.clone()))?;
    let mut correlations = Vec::new();
    for target in &sustainability.correlations {
        let (x, y) = paired_columns(t, &target.a, &target.b)?;
        let r = stats::pearson_r(&x, &y)?;
        correlations.push(CorrelationRow {
            a: target.a.clone(),
            b: target.b.clone(),
            target: target.r,
            r,
            interpretation: interpret_correlation(r),
        });
    }
    let mut trends = Vec::new();
    for c in &sustainability.columns {
        let Some(target_slope) = c.trend else { continue };
        let (years, values) = paired_columns(t, YEAR_COLUMN, &c.name)?;
        let first = years.iter().copied().fold(f64::INFINITY, f64::min);
        let last = years.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let year_mean = |y: f64| {
            let v: Vec<f64> = years
                .iter()
                .zip(&values)
                .filter(|(yr, _)| **yr == y)
                .map(|(_, v)| *v)
                .collect();
            stats::mean(&v)
        };
        trends.push(TrendRow {
            metric: c.name.clone(),
            first_year: first as i32,
            first_year_mean: year_mean(first),
            last_year: last as i32,
            last_year_mean: year_mean(last),
            target_slope,
            slope: stats::trend_slope(&years, &values)?,
        });
    }
    Ok(BaselineReport {
        summaries,
        correlations,
        trends,
    })
}

// ---- validate ------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentValidation {
    pub component: String,
    pub model: String,
    pub cv: CvResult,
    /// `(feature, importance)`, descending.
    pub importance: Vec<(String, f64)>,
}

fn ranked_importance(names: &[String], importance: &[f64]) -> Vec<(String, f64)> {
    let mut v: Vec<(String, f64)> = names.iter().cloned().zip(importance.iter().copied()).collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1));
    v
}

/// Cross-validates a forest on each component target and boosting on the
/// composite, and ranks feature importances from a full-data fit.
pub fn validate(data: &SurrogateData, seed: u64) -> Result<Vec<ComponentValidation>, ExperimentError> {
    let [_, forest, boosting] = model_specs(seed);
    data.targets()
        .into_iter()
        .map(|(name, y)| {
            let spec = if name == "composite" { boosting } else { forest };
            let cv = cross_validate(&spec, &data.features, y, CV_FOLDS, seed)?;
            let model = spec.fit(&data.features, y)?;
            let importance = model
                .feature_importance()
                .map(|imp| ranked_importance(&data.feature_names, imp))
                .unwrap_or_default();
            Ok(ComponentValidation {
                component: name.to_string(),
                model: spec.label().to_string(),
                cv,
                importance,
            })
        })
        .collect()
}

// ---- compare -------------------------------------------------------------

pub const FRAMEWORK_LABEL: &str = "Closed-form framework";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: String,
    pub metrics: RegressionMetrics,
    pub fold_r2_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    /// The method whose absolute residuals are expected to be smaller.
    pub better: String,
    pub worse: String,
    pub test: TTestResult,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub methods: Vec<MethodRow>,
    pub significance: Vec<SignificanceRow>,
}

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Cross-validated comparison on the composite target. The closed-form
/// framework predicts the noise-free objective and needs no training; it is
/// scored on the same held-out folds. Paired t-tests compare absolute
/// out-of-fold residuals (`worse - better`).
pub fn compare(data: &SurrogateData, seed: u64) -> Result<ComparisonReport, ExperimentError> {
    let y = &data.composite;
    let mut methods = Vec::new();
    let mut abs_residuals: Vec<(String, Vec<f64>)> = Vec::new();
    for spec in model_specs(seed) {
        let cv = cross_validate(&spec, &data.features, y, CV_FOLDS, seed)?;
        methods.push(MethodRow {
            method: spec.label().to_string(),
            metrics: cv.mean,
            fold_r2_std: cv.std.r2,
        });
        abs_residuals.push((
            spec.label().to_string(),
            y.iter().zip(&cv.oof_predictions).map(|(t, p)| (t - p).abs()).collect(),
        ));
    }

    let folds = crate::surrogate::fold_indices(y.len(), CV_FOLDS, seed)?;
    let fold_metrics: Vec<RegressionMetrics> = folds
        .iter()
        .map(|rows| {
            let t: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
            let p: Vec<f64> = rows.iter().map(|&i| data.composite_exact[i]).collect();
            RegressionMetrics::compute(&t, &p)
        })
        .collect();
    methods.push(MethodRow {
        method: FRAMEWORK_LABEL.to_string(),
        metrics: RegressionMetrics::mean_of(&fold_metrics),
        fold_r2_std: RegressionMetrics::std_of(&fold_metrics).r2,
    });
    abs_residuals.push((
        FRAMEWORK_LABEL.to_string(),
        y.iter().zip(&data.composite_exact).map(|(t, p)| (t - p).abs()).collect(),
    ));

    let find = |label: &str| {
        abs_residuals
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, r)| r.as_slice())
            .expect("label present")
    };
    let [linear, forest, boosting] = model_specs(seed).map(|s| s.label());
    let pairs = [
        (FRAMEWORK_LABEL, linear),
        (FRAMEWORK_LABEL, forest),
        (FRAMEWORK_LABEL, boosting),
        (boosting, linear),
    ];
    let significance = pairs
        .into_iter()
        .map(|(better, worse)| {
            let test = stats::paired_t_test(find(worse), find(better))?;
            Ok(SignificanceRow {
                better: better.to_string(),
                worse: worse.to_string(),
                significant: test.p_value < SIGNIFICANCE_LEVEL && test.t_statistic > 0.0,
                test,
            })
        })
        .collect::<Result<_, ExperimentError>>()?;
    Ok(ComparisonReport {
        methods,
        significance,
    })
}

// ---- sectors and countries -----------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: String,
    pub count: usize,
    /// Column means in the order of the requested columns.
    pub means: Vec<f64>,
    pub composite: Option<f64>,
}

/// Per-group means of `columns`, ignoring missing cells. Groups are sorted
/// by the first column, descending; ties keep name order.
pub fn group_means(
    t: &DataTable,
    group_column: &str,
    columns: &[&str],
) -> Result<Vec<GroupRow>, ExperimentError> {
    let groups = t.text(group_column)?;
    let values: Vec<Vec<Option<f64>>> = columns
        .iter()
        .map(|c| t.numeric(c))
        .collect::<Result<_, _>>()?;
    let mut acc: std::collections::BTreeMap<&str, (usize, Vec<Vec<f64>>)> = Default::default();
    for (i, g) in groups.iter().enumerate() {
        let Some(g) = g else { continue };
        let entry = acc
            .entry(g)
            .or_insert_with(|| (0, vec![Vec::new(); columns.len()]));
        entry.0 += 1;
        for (j, col) in values.iter().enumerate() {
            if let Some(v) = col[i] {
                entry.1[j].push(v);
            }
        }
    }
    let mut rows: Vec<GroupRow> = acc
        .into_iter()
        .map(|(g, (count, vals))| GroupRow {
            group: g.to_string(),
            count,
            means: vals
                .iter()
                .map(|v| if v.is_empty() { f64::NAN } else { stats::mean(v) })
                .collect(),
            composite: None,
        })
        .collect();
    rows.sort_by(|a, b| b.means[0].total_cmp(&a.means[0]));
    Ok(rows)
}

pub const SECTOR_COLUMNS: [&str; 3] = ["sustainability_impact", "business_resilience", "ai_adoption"];
pub const COUNTRY_COLUMNS: [&str; 3] =
    ["sustainability_score", "resilience_score", "ai_readiness_index"];

pub fn sectors(entrepreneurship: &DataTable) -> Result<Vec<GroupRow>, ExperimentError> {
    group_means(entrepreneurship, "sector", &SECTOR_COLUMNS)
}

/// Top `n` countries by the unweighted mean of the three country columns.
pub fn countries(sustainability: &DataTable, n: usize) -> Result<Vec<GroupRow>, ExperimentError> {
    let mut rows = group_means(sustainability, "country", &COUNTRY_COLUMNS)?;
    for r in &mut rows {
        r.composite = Some(stats::mean(&r.means));
    }
    rows.sort_by(|a, b| {
        b.composite
            .unwrap_or(f64::NAN)
            .total_cmp(&a.composite.unwrap_or(f64::NAN))
    });
    rows.truncate(n);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_map_units() {
        assert_eq!(to_model_units(Variable::AiAdoption, 45.0), 4.5);
        assert_eq!(to_model_units(Variable::EfficiencyGain, 100.0), 80.0);
        assert_eq!(to_model_units(Variable::MarketStability, -2.5), 1.0);
        assert_eq!(to_model_units(Variable::MarketStability, 2.5), 10.0);
        assert_eq!(to_model_units(Variable::WaterUsage, 123.0), 123.0);
    }
}
