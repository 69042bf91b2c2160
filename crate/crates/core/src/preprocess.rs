//! Imputation, IQR outlier handling, z-scoring and interaction features.
//!
//! Stages always run in the order impute, outliers, scale, interactions.
//! Fences are computed in raw units at fit time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{Column, ColumnKind, DataTable, TableError, Value};

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("table has no rows")]
    Empty,
    #[error("column '{0}' has no observed values")]
    AllMissing(String),
    #[error("iqr multiplier must be positive, got {0}")]
    InvalidMultiplier(f64),
    #[error("column '{0}' is not a numeric column of the table")]
    NotNumeric(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdKind {
    #[default]
    Population,
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutlierAction {
    #[default]
    Winsorize,
    Drop,
    Keep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Mean for numeric columns, mode for categorical ones.
    pub impute: bool,
    pub scale: bool,
    pub std_kind: StdKind,
    pub iqr_multiplier: f64,
    pub outlier_action: OutlierAction,
    pub interaction_pairs: Vec<(String, String)>,
    /// Numeric columns exempt from outlier handling and scaling.
    pub passthrough: Vec<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            impute: true,
            scale: true,
            std_kind: StdKind::Population,
            iqr_multiplier: 1.5,
            outlier_action: OutlierAction::Winsorize,
            interaction_pairs: vec![("sustainability_score".into(), "resilience_score".into())],
            passthrough: vec!["year".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedColumn {
    Numeric {
        name: String,
        mean: f64,
        std: f64,
        q1: f64,
        q3: f64,
        passthrough: bool,
    },
    Categorical {
        name: String,
        mode: Option<String>,
    },
}

impl FittedColumn {
    pub fn name(&self) -> &str {
        match self {
            FittedColumn::Numeric { name, .. } | FittedColumn::Categorical { name, .. } => name,
        }
    }

    fn kind(&self) -> ColumnKind {
        match self {
            FittedColumn::Numeric { .. } => ColumnKind::Numeric,
            FittedColumn::Categorical { .. } => ColumnKind::Categorical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedPipeline {
    pub config: PipelineConfig,
    pub columns: Vec<FittedColumn>,
    pub warnings: Vec<String>,
}

/// Linear interpolation between order statistics at zero-based position
/// `p * (n - 1)`. `sorted` must be non-empty and ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `(lower, upper)` fences `Q1 - k IQR`, `Q3 + k IQR`.
pub fn iqr_fences(q1: f64, q3: f64, k: f64) -> (f64, f64) {
    let iqr = q3 - q1;
    (q1 - k * iqr, q3 + k * iqr)
}

fn std_of(x: &[f64], kind: StdKind) -> f64 {
    match kind {
        StdKind::Population => crate::stats::population_std(x),
        StdKind::Sample if x.len() < 2 => 0.0,
        StdKind::Sample => crate::stats::sample_std(x),
    }
}

/// Most frequent value; ties go to the lexicographically smallest.
fn mode<'a>(values: impl Iterator<Item = &'a str>) -> Option<String> {
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let best = counts.values().copied().max()?;
    counts
        .into_iter()
        .find(|&(_, c)| c == best)
        .map(|(k, _)| k.to_string())
}

pub fn fit(t: &DataTable, cfg: &PipelineConfig) -> Result<FittedPipeline, PreprocessError> {
    if !(cfg.iqr_multiplier > 0.0 && cfg.iqr_multiplier.is_finite()) {
        return Err(PreprocessError::InvalidMultiplier(cfg.iqr_multiplier));
    }
    if t.n_rows() == 0 {
        return Err(PreprocessError::Empty);
    }
    let numeric = |name: &str| {
        t.columns()
            .iter()
            .any(|c| c.name == name && c.kind == ColumnKind::Numeric)
    };
    for name in cfg
        .passthrough
        .iter()
        .filter(|n| t.column_index(n).is_ok())
        .chain(cfg.interaction_pairs.iter().flat_map(|(a, b)| [a, b]))
    {
        if !numeric(name) {
            return Err(PreprocessError::NotNumeric(name.clone()));
        }
    }

    let mut columns = Vec::with_capacity(t.n_cols());
    let mut warnings = Vec::new();
    for c in t.columns() {
        match c.kind {
            ColumnKind::Numeric => {
                let mut x = t.observed(&c.name)?;
                if x.is_empty() {
                    return Err(PreprocessError::AllMissing(c.name.clone()));
                }
                x.sort_by(f64::total_cmp);
                let std = std_of(&x, cfg.std_kind);
                let passthrough = cfg.passthrough.contains(&c.name);
                if cfg.scale && !passthrough && std == 0.0 {
                    warnings.push(format!("column '{}' has zero std and is left unscaled", c.name));
                }
                columns.push(FittedColumn::Numeric {
                    name: c.name.clone(),
                    mean: crate::stats::mean(&x),
                    std,
                    q1: quantile_sorted(&x, 0.25),
                    q3: quantile_sorted(&x, 0.75),
                    passthrough,
                });
            }
            ColumnKind::Categorical => {
                let observed = t.text(&c.name)?;
                columns.push(FittedColumn::Categorical {
                    name: c.name.clone(),
                    mode: mode(observed.into_iter().flatten()),
                });
            }
        }
    }
    Ok(FittedPipeline {
        config: cfg.clone(),
        columns,
        warnings,
    })
}

impl FittedPipeline {
    pub fn column(&self, name: &str) -> Option<&FittedColumn> {
        self.columns.iter().find(|c| c.name() == name)
    }

    /// Fences of a numeric column in raw units.
    pub fn fences(&self, name: &str) -> Option<(f64, f64)> {
        match self.column(name)? {
            FittedColumn::Numeric { q1, q3, .. } => {
                Some(iqr_fences(*q1, *q3, self.config.iqr_multiplier))
            }
            FittedColumn::Categorical { .. } => None,
        }
    }

    fn check_schema(&self, t: &DataTable) -> Result<(), PreprocessError> {
        if t.n_cols() != self.columns.len() {
            return Err(PreprocessError::Schema(format!(
                "expected {} columns, got {}",
                self.columns.len(),
                t.n_cols()
            )));
        }
        for (c, f) in t.columns().iter().zip(&self.columns) {
            if c.name != f.name() || c.kind != f.kind() {
                return Err(PreprocessError::Schema(format!(
                    "column '{}' does not match fitted column '{}'",
                    c.name,
                    f.name()
                )));
            }
        }
        Ok(())
    }

    pub fn transform(&self, t: &DataTable) -> Result<DataTable, PreprocessError> {
        self.check_schema(t)?;
        let cfg = &self.config;
        let mut out = t.clone();

        if cfg.impute {
            for (j, f) in self.columns.iter().enumerate() {
                let fill = match f {
                    FittedColumn::Numeric { mean, .. } => Value::Number(*mean),
                    FittedColumn::Categorical { mode: Some(m), .. } => Value::Text(m.clone()),
                    FittedColumn::Categorical { mode: None, .. } => continue,
                };
                for i in 0..out.n_rows() {
                    if out.get(i, j).is_missing() {
                        out.set(i, j, fill.clone())?;
                    }
                }
            }
        }

        let fenced: Vec<(usize, f64, f64)> = self
            .columns
            .iter()
            .enumerate()
            .filter_map(|(j, f)| match f {
                FittedColumn::Numeric {
                    q1,
                    q3,
                    passthrough: false,
                    ..
                } => {
                    let (lo, hi) = iqr_fences(*q1, *q3, cfg.iqr_multiplier);
                    Some((j, lo, hi))
                }
                _ => None,
            })
            .collect();
        match cfg.outlier_action {
            OutlierAction::Keep => {}
            OutlierAction::Winsorize => {
                for &(j, lo, hi) in &fenced {
                    for i in 0..out.n_rows() {
                        if let Some(x) = out.get(i, j).as_f64() {
                            let c = x.clamp(lo, hi);
                            if c != x {
                                out.set(i, j, Value::Number(c))?;
                            }
                        }
                    }
                }
            }
            OutlierAction::Drop => {
                let keep: Vec<bool> = (0..out.n_rows())
                    .map(|i| {
                        fenced.iter().all(|&(j, lo, hi)| {
                            out.get(i, j).as_f64().is_none_or(|x| (lo..=hi).contains(&x))
                        })
                    })
                    .collect();
                out.retain_rows(|i| keep[i]);
            }
        }

        if cfg.scale {
            for (j, f) in self.columns.iter().enumerate() {
                if let FittedColumn::Numeric {
                    mean,
                    std,
                    passthrough: false,
                    ..
                } = f
                {
                    if *std == 0.0 {
                        continue;
                    }
                    for i in 0..out.n_rows() {
                        if let Some(x) = out.get(i, j).as_f64() {
                            out.set(i, j, Value::Number((x - mean) / std))?;
                        }
                    }
                }
            }
        }

        for (a, b) in &cfg.interaction_pairs {
            let ja = out.column_index(a)?;
            let jb = out.column_index(b)?;
            let values = (0..out.n_rows())
                .map(|i| match (out.get(i, ja).as_f64(), out.get(i, jb).as_f64()) {
                    (Some(x), Some(y)) => Value::Number(x * y),
                    _ => Value::Missing,
                })
                .collect();
            out.add_column(Column::numeric(format!("{a}_x_{b}")), values)?;
        }
        Ok(out)
    }
}
