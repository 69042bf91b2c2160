//! Seeded synthetic tables with target marginals, pairwise correlations and
//! linear year trends.
//!
//! Numeric columns are drawn from a Gaussian copula: standard normals are
//! centred, made orthogonal to the year, whitened, then coloured by the
//! Cholesky factor of the requested correlation. Each column is mapped to
//! its mean and standard deviation, the trend is added and values are
//! clipped to the column range. Clipping pulls correlations and slopes
//! towards zero, so both are inflated before sampling (correlations by at
//! most 10%) and checked afterwards.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::derive_seeds;
use crate::stats::{mean, pearson_r, population_std, trend_slope};
use crate::table::{Column, DataTable, Value};

pub const CORRELATION_TOLERANCE: f64 = 0.05;
pub const SLOPE_RELATIVE_TOLERANCE: f64 = 0.15;
/// Fidelity is only enforced from this many rows up.
pub const VERIFY_MIN_ROWS: usize = 500;
const MAX_RETRIES: usize = 5;
const MAX_INFLATION: f64 = 1.1;
const MAX_TREND_INFLATION: f64 = 1.25;
const CALIBRATION_PASSES: usize = 4;
const EIGEN_FLOOR: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("column '{0}': {1}")]
    Column(String, String),
    #[error("duplicate column '{0}'")]
    DuplicateColumn(String),
    #[error("correlation references unknown column '{0}'")]
    UnknownColumn(String),
    #[error("correlation between '{a}' and '{b}' must lie in [-1, 1], got {r}")]
    CorrelationRange { a: String, b: String, r: f64 },
    #[error("row count {rows} does not match the layout ({expected})")]
    RowCount { rows: usize, expected: usize },
    #[error("trend on '{0}' requires a panel layout")]
    TrendWithoutYears(String),
    #[error("correlation matrix is not positive semi-definite after repair")]
    NotPsd,
    #[error("fidelity targets missed after {attempts} attempts: {detail}")]
    Fidelity { attempts: usize, detail: String },
    #[error("missing fraction must lie in [0, 0.05], got {0}")]
    MissingFraction(f64),
    #[error("unknown column '{0}'")]
    UnknownTableColumn(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub mean: f64,
    pub std: f64,
    /// Change per year; requires a panel layout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend: Option<f64>,
}

impl ColumnSpec {
    /// Mean at the range midpoint and std at a sixth of the range.
    pub fn from_range(name: &str, lo: f64, hi: f64) -> Self {
        Self {
            name: name.to_string(),
            lo,
            hi,
            mean: 0.5 * (lo + hi),
            std: (hi - lo) / 6.0,
            trend: None,
        }
    }

    pub fn new(name: &str, lo: f64, hi: f64, mean: f64, std: f64) -> Self {
        Self {
            name: name.to_string(),
            lo,
            hi,
            mean,
            std,
            trend: None,
        }
    }

    pub fn with_trend(mut self, slope: f64) -> Self {
        self.trend = Some(slope);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationTarget {
    pub a: String,
    pub b: String,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntityLayout {
    /// entity × year × records per cell, entity-major.
    Panel {
        entity_column: String,
        entities: Vec<String>,
        first_year: i32,
        years: usize,
        records_per_cell: usize,
    },
    /// Groups assigned round-robin with a sequential id.
    Grouped {
        group_column: String,
        groups: Vec<String>,
        id_column: String,
        id_prefix: String,
    },
    Plain {
        id_column: String,
        id_prefix: String,
    },
}

pub const YEAR_COLUMN: &str = "year";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    pub rows: usize,
    pub layout: EntityLayout,
    pub columns: Vec<ColumnSpec>,
    #[serde(default)]
    pub correlations: Vec<CorrelationTarget>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        for (i, c) in self.columns.iter().enumerate() {
            let bad = |msg: &str| Err(SpecError::Column(c.name.clone(), msg.to_string()));
            if self.columns[..i].iter().any(|o| o.name == c.name) {
                return Err(SpecError::DuplicateColumn(c.name.clone()));
            }
            if !(c.lo.is_finite() && c.hi.is_finite() && c.lo < c.hi) {
                return bad("requires finite lo < hi");
            }
            if !c.mean.is_finite() || !(c.std >= 0.0 && c.std.is_finite()) {
                return bad("requires a finite mean and std >= 0");
            }
            if let Some(s) = c.trend {
                if !s.is_finite() {
                    return bad("trend must be finite");
                }
                if !matches!(self.layout, EntityLayout::Panel { .. }) {
                    return Err(SpecError::TrendWithoutYears(c.name.clone()));
                }
            }
        }
        for t in &self.correlations {
            for n in [&t.a, &t.b] {
                if !self.columns.iter().any(|c| &c.name == n) {
                    return Err(SpecError::UnknownColumn(n.clone()));
                }
            }
            if !(-1.0..=1.0).contains(&t.r) || t.a == t.b {
                return Err(SpecError::CorrelationRange {
                    a: t.a.clone(),
                    b: t.b.clone(),
                    r: t.r,
                });
            }
        }
        let expected = match &self.layout {
            EntityLayout::Panel {
                entities,
                years,
                records_per_cell,
                ..
            } => entities.len() * years * records_per_cell,
            EntityLayout::Grouped { groups, .. } if groups.is_empty() => 0,
            _ => self.rows,
        };
        if expected != self.rows || self.rows == 0 {
            return Err(SpecError::RowCount {
                rows: self.rows,
                expected,
            });
        }
        Ok(())
    }

    fn year_vector(&self) -> Option<Vec<f64>> {
        match &self.layout {
            EntityLayout::Panel {
                first_year,
                years,
                records_per_cell,
                ..
            } => Some(
                (0..self.rows)
                    .map(|i| (first_year + ((i / records_per_cell) % years) as i32) as f64)
                    .collect(),
            ),
            _ => None,
        }
    }

    fn column_index(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .expect("validated")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedCorrelation {
    pub a: String,
    pub b: String,
    pub target: f64,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedSlope {
    pub column: String,
    pub target: f64,
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedMarginal {
    pub column: String,
    pub target_mean: f64,
    pub realized_mean: f64,
    pub target_std: f64,
    pub realized_std: f64,
    pub min: f64,
    pub max: f64,
}

/// What a generated table achieved against its spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub dataset: String,
    pub rows: usize,
    pub seed: u64,
    pub attempts: usize,
    pub verified: bool,
    pub marginals: Vec<RealizedMarginal>,
    pub correlations: Vec<RealizedCorrelation>,
    pub slopes: Vec<RealizedSlope>,
}

impl GenerationReport {
    fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.correlations {
            if (c.realized - c.target).abs() > CORRELATION_TOLERANCE {
                out.push(format!("r({}, {}) = {:.3} vs {}", c.a, c.b, c.realized, c.target));
            }
        }
        for s in &self.slopes {
            if (s.realized - s.target).abs() > SLOPE_RELATIVE_TOLERANCE * s.target.abs() {
                out.push(format!("slope({}) = {:.4} vs {}", s.column, s.realized, s.target));
            }
        }
        out
    }

    fn max_slope_error(&self) -> f64 {
        self.slopes
            .iter()
            .map(|s| ((s.realized - s.target) / s.target).abs())
            .fold(0.0, f64::max)
    }

    fn max_correlation_error(&self) -> f64 {
        self.correlations
            .iter()
            .map(|c| (c.realized - c.target).abs())
            .fold(0.0, f64::max)
    }
}

/// Symmetric matrix with unit diagonal projected onto the PSD cone by
/// clipping eigenvalues, then rescaled back to unit diagonal.
pub fn repair_correlation(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let clipped = eig.eigenvalues.map(|l| l.max(EIGEN_FLOOR));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let d = rebuilt.diagonal().map(|v| 1.0 / v.sqrt());
    let mut out = DMatrix::from_diagonal(&d) * rebuilt * DMatrix::from_diagonal(&d);
    for i in 0..out.nrows() {
        out[(i, i)] = 1.0;
        for j in 0..i {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

struct Prepared {
    /// Centred, year-orthogonal, whitened normals (rows × columns).
    z: DMatrix<f64>,
    years: Option<Vec<f64>>,
    year_mean: f64,
    year_var: f64,
}

fn prepare(spec: &GeneratorSpec, sub_seed: u64) -> Result<Prepared, SpecError> {
    let n = spec.rows;
    let k = spec.columns.len();
    let years = spec.year_vector();
    let (year_mean, year_var) = years
        .as_ref()
        .map(|y| (mean(y), population_std(y).powi(2)))
        .unwrap_or((0.0, 0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    let mut z = DMatrix::<f64>::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            z[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    for mut col in z.column_iter_mut() {
        let m = col.mean();
        col.add_scalar_mut(-m);
    }
    if let Some(y) = &years {
        let u: Vec<f64> = y.iter().map(|v| v - year_mean).collect();
        let uu: f64 = u.iter().map(|v| v * v).sum();
        if uu > 0.0 {
            for mut col in z.column_iter_mut() {
                let proj = col.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() / uu;
                for (c, ui) in col.iter_mut().zip(&u) {
                    *c -= proj * ui;
                }
            }
        }
    }
    if n > k + 1 {
        let cov = z.transpose() * &z / n as f64;
        if let Some(chol) = cov.cholesky() {
            // z <- z L^{-T}, so the sample covariance becomes the identity.
            let lt = chol.l().transpose();
            if let Some(inv) = lt.try_inverse() {
                z *= inv;
            }
        }
    }
    Ok(Prepared {
        z,
        years,
        year_mean,
        year_var,
    })
}

/// Sampling parameters after inflation.
struct Plan {
    corr_inflation: Vec<f64>,
    trends: Vec<f64>,
    noise_std: Vec<f64>,
}

impl Plan {
    fn new(
        spec: &GeneratorSpec,
        prep: &Prepared,
        corr_inflation: Vec<f64>,
        trend_inflation: &[f64],
    ) -> Result<Self, SpecError> {
        let mut trends = Vec::with_capacity(spec.columns.len());
        let mut noise_std = Vec::with_capacity(spec.columns.len());
        for (c, f) in spec.columns.iter().zip(trend_inflation) {
            let slope = c.trend.unwrap_or(0.0) * f;
            let v = c.std * c.std - slope * slope * prep.year_var;
            if v < 0.0 {
                return Err(SpecError::Column(
                    c.name.clone(),
                    "trend variance exceeds the requested std".into(),
                ));
            }
            trends.push(slope);
            noise_std.push(v.sqrt());
        }
        Ok(Self {
            corr_inflation,
            trends,
            noise_std,
        })
    }
}

fn copula_correlation(
    spec: &GeneratorSpec,
    prep: &Prepared,
    plan: &Plan,
) -> Result<DMatrix<f64>, SpecError> {
    let k = spec.columns.len();
    let mut m = DMatrix::<f64>::identity(k, k);
    for (t, f) in spec.correlations.iter().zip(&plan.corr_inflation) {
        let i = spec.column_index(&t.a);
        let j = spec.column_index(&t.b);
        let (ci, cj) = (&spec.columns[i], &spec.columns[j]);
        let (si, sj) = (plan.noise_std[i], plan.noise_std[j]);
        if si == 0.0 || sj == 0.0 {
            continue;
        }
        let target = (t.r * f).clamp(-0.999, 0.999);
        let trend_cov = plan.trends[i] * plan.trends[j] * prep.year_var;
        let rho = ((target * ci.std * cj.std - trend_cov) / (si * sj)).clamp(-0.999, 0.999);
        m[(i, j)] = rho;
        m[(j, i)] = rho;
    }
    let repaired = repair_correlation(&m);
    if !repaired.iter().all(|v| v.is_finite()) {
        return Err(SpecError::NotPsd);
    }
    Ok(repaired)
}

fn sample_values(
    spec: &GeneratorSpec,
    prep: &Prepared,
    plan: &Plan,
) -> Result<Vec<Vec<f64>>, SpecError> {
    let corr = copula_correlation(spec, prep, plan)?;
    let l = corr.cholesky().ok_or(SpecError::NotPsd)?.l();
    let y = &prep.z * l.transpose();
    let cols = spec
        .columns
        .iter()
        .enumerate()
        .map(|(j, c)| {
            (0..spec.rows)
                .map(|i| {
                    let trend = match &prep.years {
                        Some(yr) => plan.trends[j] * (yr[i] - prep.year_mean),
                        None => 0.0,
                    };
                    (c.mean + plan.noise_std[j] * y[(i, j)] + trend).clamp(c.lo, c.hi)
                })
                .collect()
        })
        .collect();
    Ok(cols)
}

fn measure(
    spec: &GeneratorSpec,
    cols: &[Vec<f64>],
    years: Option<&[f64]>,
    attempts: usize,
    verified: bool,
) -> GenerationReport {
    let marginals = spec
        .columns
        .iter()
        .zip(cols)
        .map(|(c, v)| RealizedMarginal {
            column: c.name.clone(),
            target_mean: c.mean,
            realized_mean: mean(v),
            target_std: c.std,
            realized_std: population_std(v),
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    let correlations = spec
        .correlations
        .iter()
        .map(|t| {
            let a = &cols[spec.column_index(&t.a)];
            let b = &cols[spec.column_index(&t.b)];
            RealizedCorrelation {
                a: t.a.clone(),
                b: t.b.clone(),
                target: t.r,
                realized: pearson_r(a, b).unwrap_or(0.0),
            }
        })
        .collect();
    let slopes = match years {
        Some(yr) => spec
            .columns
            .iter()
            .zip(cols)
            .filter_map(|(c, v)| {
                c.trend.map(|s| RealizedSlope {
                    column: c.name.clone(),
                    target: s,
                    realized: trend_slope(yr, v).unwrap_or(0.0),
                })
            })
            .collect(),
        None => Vec::new(),
    };
    GenerationReport {
        dataset: spec.name.clone(),
        rows: spec.rows,
        seed: spec.seed,
        attempts,
        verified,
        marginals,
        correlations,
        slopes,
    }
}

fn build_table(spec: &GeneratorSpec, cols: &[Vec<f64>]) -> DataTable {
    let mut columns = Vec::new();
    match &spec.layout {
        EntityLayout::Panel { entity_column, .. } => {
            columns.push(Column::categorical(entity_column.clone()));
            columns.push(Column::numeric(YEAR_COLUMN));
        }
        EntityLayout::Grouped {
            group_column,
            id_column,
            ..
        } => {
            columns.push(Column::categorical(id_column.clone()));
            columns.push(Column::categorical(group_column.clone()));
        }
        EntityLayout::Plain { id_column, .. } => {
            columns.push(Column::categorical(id_column.clone()));
        }
    }
    columns.extend(spec.columns.iter().map(|c| Column::numeric(c.name.clone())));
    let mut table = DataTable::new(spec.name.clone(), columns).expect("names validated");
    let width = (spec.rows.max(1)).to_string().len().max(4);
    for i in 0..spec.rows {
        let mut row = match &spec.layout {
            EntityLayout::Panel {
                entities,
                first_year,
                years,
                records_per_cell,
                ..
            } => {
                let cell = i / records_per_cell;
                vec![
                    Value::Text(entities[cell / years].clone()),
                    Value::Number((first_year + (cell % years) as i32) as f64),
                ]
            }
            EntityLayout::Grouped {
                groups, id_prefix, ..
            } => vec![
                Value::Text(format!("{id_prefix}{:0width$}", i + 1)),
                Value::Text(groups[i % groups.len()].clone()),
            ],
            EntityLayout::Plain { id_prefix, .. } => {
                vec![Value::Text(format!("{id_prefix}{:0width$}", i + 1))]
            }
        };
        row.extend(cols.iter().map(|c| Value::Number(c[i])));
        table.push_row(row).expect("generated values are finite");
    }
    table
}

fn recalibrate(factor: f64, target: f64, realized: f64, cap: f64) -> f64 {
    if realized != 0.0 && realized.signum() == target.signum() {
        (factor * target / realized).clamp(1.0, cap)
    } else {
        factor
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<DataTable, SpecError> {
    generate_with_report(spec).map(|(t, _)| t)
}

/// Generates the table and reports realized statistics. Tables with at
/// least [`VERIFY_MIN_ROWS`] rows must meet the correlation and slope
/// tolerances, retrying with fresh sub-seeds before giving up.
pub fn generate_with_report(spec: &GeneratorSpec) -> Result<(DataTable, GenerationReport), SpecError> {
    spec.validate()?;
    let verify = spec.rows >= VERIFY_MIN_ROWS;
    let mut last_failures = Vec::new();
    for (attempt, sub_seed) in derive_seeds(spec.seed, MAX_RETRIES).into_iter().enumerate() {
        let prep = prepare(spec, sub_seed)?;
        let mut corr_inflation = vec![1.0; spec.correlations.len()];
        let mut trend_inflation = vec![1.0; spec.columns.len()];
        let mut plan = Plan::new(spec, &prep, corr_inflation.clone(), &trend_inflation)?;
        let mut cols = sample_values(spec, &prep, &plan)?;
        let mut report = measure(spec, &cols, prep.years.as_deref(), attempt + 1, verify);
        for _ in 0..CALIBRATION_PASSES {
            if report.max_correlation_error() < 0.005 && report.max_slope_error() < 0.01 {
                break;
            }
            for (f, c) in corr_inflation.iter_mut().zip(&report.correlations) {
                *f = recalibrate(*f, c.target, c.realized, MAX_INFLATION);
            }
            for s in &report.slopes {
                let j = spec.column_index(&s.column);
                trend_inflation[j] =
                    recalibrate(trend_inflation[j], s.target, s.realized, MAX_TREND_INFLATION);
            }
            plan = Plan::new(spec, &prep, corr_inflation.clone(), &trend_inflation)?;
            cols = sample_values(spec, &prep, &plan)?;
            report = measure(spec, &cols, prep.years.as_deref(), attempt + 1, verify);
        }
        last_failures = report.failures();
        if !verify || last_failures.is_empty() {
            return Ok((build_table(spec, &cols), report));
        }
    }
    Err(SpecError::Fidelity {
        attempts: MAX_RETRIES,
        detail: last_failures.join("; "),
    })
}

/// Blanks `round(fraction * numeric cells)` uniformly chosen numeric cells.
pub fn inject_missing(t: &DataTable, fraction: f64, seed: u64) -> Result<DataTable, SpecError> {
    inject_missing_except(t, fraction, seed, &[])
}

/// As [`inject_missing`], leaving the `protected` columns untouched.
pub fn inject_missing_except(
    t: &DataTable,
    fraction: f64,
    seed: u64,
    protected: &[&str],
) -> Result<DataTable, SpecError> {
    if !(0.0..=0.05).contains(&fraction) {
        return Err(SpecError::MissingFraction(fraction));
    }
    for p in protected {
        if t.column_index(p).is_err() {
            return Err(SpecError::UnknownTableColumn(p.to_string()));
        }
    }
    let cols: Vec<usize> = t
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.kind == crate::table::ColumnKind::Numeric && !protected.contains(&c.name.as_str())
        })
        .map(|(j, _)| j)
        .collect();
    let total = cols.len() * t.n_rows();
    let k = (fraction * total as f64).round() as usize;
    let open: Vec<(usize, usize)> = (0..t.n_rows())
        .flat_map(|i| cols.iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| !t.get(i, j).is_missing())
        .collect();
    let mut out = t.clone();
    if k == 0 {
        return Ok(out);
    }
    let k = k.min(open.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in sample(&mut rng, open.len(), k) {
        let (i, j) = open[idx];
        out.set(i, j, Value::Missing).expect("missing is always allowed");
    }
    Ok(out)
}

pub const SECTORS: [&str; 14] = [
    "Smart Cities",
    "Clean Energy",
    "Energy Storage",
    "Green Finance",
    "Carbon Capture",
    "Climate Tech",
    "Green Transportation",
    "Waste Management",
    "Sustainable Agriculture",
    "Circular Economy",
    "Water Technology",
    "Green Buildings",
    "Precision Forestry",
    "Sustainable Materials",
];

fn country_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("Country {i:02}")).collect()
}

fn corr(a: &str, b: &str, r: f64) -> CorrelationTarget {
    CorrelationTarget {
        a: a.into(),
        b: b.into(),
        r,
    }
}

pub fn llm_energy_spec(seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        name: "llm_energy".into(),
        rows: 200,
        layout: EntityLayout::Plain {
            id_column: "model_id".into(),
            id_prefix: "M".into(),
        },
        columns: vec![
            ColumnSpec::new("parameters_b", 0.1, 179.8, 34.2, 52.6),
            ColumnSpec::new("training_energy_mwh", 50.5, 1997.7, 634.0, 472.6),
            ColumnSpec::from_range("carbon_emissions_t", 20.2, 1198.6),
            ColumnSpec::from_range("water_usage_l", 100.0, 5000.0),
        ],
        correlations: vec![
            corr("parameters_b", "training_energy_mwh", 0.65),
            corr("training_energy_mwh", "carbon_emissions_t", 0.80),
        ],
        seed,
    }
}

pub fn sustainability_spec(seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        name: "sustainability".into(),
        rows: 530,
        layout: EntityLayout::Panel {
            entity_column: "country".into(),
            entities: country_labels(53),
            first_year: 2015,
            years: 10,
            records_per_cell: 1,
        },
        columns: vec![
            ColumnSpec::new("gdp_per_capita", 5380.0, 79831.0, 43705.0, 21009.0),
            ColumnSpec::new("renewable_energy_pct", 10.4, 89.8, 52.1, 23.4).with_trend(0.67),
            ColumnSpec::new("sustainability_score", 35.8, 85.5, 60.0, 9.6).with_trend(0.89),
            ColumnSpec::from_range("resilience_score", 17.4, 38.1),
            ColumnSpec::from_range("environmental_policy_score", 20.0, 95.0),
            ColumnSpec::new("innovation_index", 20.0, 100.0, 62.0, 80.0 / 6.0).with_trend(0.82),
            ColumnSpec::new("ai_readiness_index", 10.0, 90.0, 40.25, 80.0 / 6.0).with_trend(1.12),
            ColumnSpec::from_range("economic_complexity_index", -2.0, 2.5),
            ColumnSpec::from_range("digital_infrastructure_score", 20.0, 100.0),
            ColumnSpec::from_range("green_finance_index", 5.0, 95.0),
            ColumnSpec::from_range("energy_efficiency_index", 20.0, 100.0),
            ColumnSpec::from_range("regulatory_quality", -2.5, 2.5),
            ColumnSpec::from_range("ai_investment_per_capita", 10.0, 1000.0),
            ColumnSpec::new("carbon_intensity", 0.05, 0.9, 0.431, 0.85 / 6.0).with_trend(-0.012),
            ColumnSpec::from_range("energy_consumption", 50.0, 2000.0),
            ColumnSpec::from_range("carbon_emissions", 20.0, 1000.0),
            ColumnSpec::from_range("water_usage", 100.0, 5000.0),
        ],
        correlations: vec![
            corr("economic_complexity_index", "resilience_score", 0.82),
            corr("renewable_energy_pct", "sustainability_score", 0.71),
            corr("environmental_policy_score", "sustainability_score", 0.55),
            corr("innovation_index", "ai_readiness_index", 0.48),
            corr("gdp_per_capita", "digital_infrastructure_score", 0.43),
        ],
        seed,
    }
}

pub fn renewable_market_spec(seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        name: "renewable_market".into(),
        rows: 1000,
        layout: EntityLayout::Panel {
            entity_column: "country".into(),
            entities: country_labels(20),
            first_year: 2015,
            years: 10,
            records_per_cell: 5,
        },
        columns: vec![
            ColumnSpec::from_range("capacity_mw", 1000.0, 50000.0),
            ColumnSpec::from_range("green_finance_busd", 0.5, 20.0),
            ColumnSpec::from_range("market_concentration", 0.1, 0.9),
            ColumnSpec::from_range("policy_support_score", 10.0, 100.0),
        ],
        correlations: vec![
            corr("capacity_mw", "green_finance_busd", 0.60),
            corr("policy_support_score", "green_finance_busd", 0.40),
        ],
        seed,
    }
}

pub fn entrepreneurship_spec(seed: u64) -> GeneratorSpec {
    GeneratorSpec {
        name: "entrepreneurship".into(),
        rows: 500,
        layout: EntityLayout::Grouped {
            group_column: "sector".into(),
            groups: SECTORS.iter().map(|s| s.to_string()).collect(),
            id_column: "company_id".into(),
            id_prefix: "C".into(),
        },
        columns: vec![
            ColumnSpec::from_range("ai_adoption", 1.0, 10.0),
            ColumnSpec::from_range("sustainability_impact", 10.9, 80.7),
            ColumnSpec::from_range("business_resilience", 10.9, 80.7),
            ColumnSpec::from_range("revenue_growth_pct", -20.0, 60.0),
            ColumnSpec::from_range("profit_margin_pct", -10.0, 40.0),
        ],
        correlations: vec![
            corr("ai_adoption", "sustainability_impact", 0.50),
            corr("ai_adoption", "business_resilience", 0.45),
            corr("sustainability_impact", "business_resilience", 0.60),
        ],
        seed,
    }
}

/// The four built-in datasets, all seeded from `seed`.
pub fn builtin_specs(seed: u64) -> Vec<GeneratorSpec> {
    vec![
        llm_energy_spec(seed),
        sustainability_spec(seed),
        renewable_market_spec(seed),
        entrepreneurship_spec(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_row_counts() {
        let specs = builtin_specs(1);
        let rows: Vec<_> = specs.iter().map(|s| (s.name.as_str(), s.rows)).collect();
        assert_eq!(
            rows,
            [
                ("llm_energy", 200),
                ("sustainability", 530),
                ("renewable_market", 1000),
                ("entrepreneurship", 500)
            ]
        );
        for s in &specs {
            s.validate().unwrap();
        }
        let EntityLayout::Grouped { groups, .. } = &entrepreneurship_spec(1).layout else {
            panic!("entrepreneurship is grouped");
        };
        assert_eq!(groups.len(), 14);
    }

    #[test]
    fn zero_std_column_is_constant() {
        let spec = GeneratorSpec {
            name: "flat".into(),
            rows: 50,
            layout: EntityLayout::Plain {
                id_column: "id".into(),
                id_prefix: "r".into(),
            },
            columns: vec![
                ColumnSpec::new("flat", 0.0, 10.0, 3.5, 0.0),
                ColumnSpec::from_range("other", 0.0, 1.0),
            ],
            correlations: vec![],
            seed: 9,
        };
        let t = generate(&spec).unwrap();
        assert!(t.observed("flat").unwrap().iter().all(|&v| v == 3.5));
    }

    #[test]
    fn repair_makes_psd() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0]);
        let r = repair_correlation(&m);
        assert!(r.clone().cholesky().is_some());
        for i in 0..3 {
            assert_eq!(r[(i, i)], 1.0);
        }
        let ok = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let same = repair_correlation(&ok);
        assert!((same[(0, 1)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spec_validation() {
        let mut s = llm_energy_spec(0);
        s.columns[0].hi = s.columns[0].lo;
        assert!(matches!(s.validate(), Err(SpecError::Column(..))));
        let mut s = llm_energy_spec(0);
        s.columns[0].trend = Some(1.0);
        assert!(matches!(s.validate(), Err(SpecError::TrendWithoutYears(_))));
        let mut s = llm_energy_spec(0);
        s.correlations.push(corr("parameters_b", "nope", 0.1));
        assert_eq!(s.validate(), Err(SpecError::UnknownColumn("nope".into())));
        let mut s = sustainability_spec(0);
        s.rows = 531;
        assert!(matches!(s.validate(), Err(SpecError::RowCount { .. })));
    }

    #[test]
    fn spec_json_round_trip() {
        let s = sustainability_spec(5);
        let json = serde_json::to_string(&s).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<GeneratorSpec>(&json.replacen("\"rows\"", "\"rowz\"", 1)).is_err());
    }

    #[test]
    fn missing_injection_counts() {
        let t = generate(&llm_energy_spec(3)).unwrap();
        assert_eq!(inject_missing(&t, 0.0, 1).unwrap(), t);
        let m = inject_missing(&t, 0.05, 1).unwrap();
        assert_eq!(m.missing_count(), 40);
        assert_eq!(m, inject_missing(&t, 0.05, 1).unwrap());
        assert!(matches!(inject_missing(&t, 0.06, 1), Err(SpecError::MissingFraction(_))));
    }
}
