//! Tabular and SVG rendering of results.
//!
//! Every table renders to a markdown pipe table and to CSV; the CSV reads
//! back through [`DataTable::read_csv`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::experiments::{
    BaselineReport, ComparisonReport, ComponentValidation, GroupRow, COUNTRY_COLUMNS,
    SECTOR_COLUMNS,
};
use crate::model::{DeploymentStrategy, Variable};
use crate::sensitivity::{SensitivityRow, WeightSweepRow};
use crate::solver::OptimizationResult;
use crate::table::{DataTable, TableError};

/// Digits after the decimal point for report cells.
pub const PRECISION: usize = 6;

pub fn num(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    let s = format!("{x:.PRECISION$}");
    // "-0.000000" reads badly and breaks byte comparisons across platforms.
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ReportTable {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.headers.len(), "row arity");
        self.rows.push(row);
    }

    pub fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "### {}\n", self.title);
        }
        let _ = writeln!(
            out,
            "| {} |",
            self.headers.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | ")
        );
        let _ = writeln!(out, "|{}", "---|".repeat(self.headers.len()));
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} |",
                r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | ")
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_data_table(&self) -> Result<DataTable, TableError> {
        DataTable::read_csv(self.title.clone(), self.to_csv().as_bytes())
    }
}

/// A bar chart on a fixed 800x500 canvas. Negative values extend below the
/// zero line.
pub fn bar_chart_svg(title: &str, bars: &[(String, f64)]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 120.0;
    let esc = |s: &str| {
        s.replace('&', "&amp;")
            .replace('<', "&lt;")
            .replace('>', "&gt;")
            .replace('"', "&quot;")
    };

    let hi = bars.iter().map(|b| b.1).fold(0.0_f64, f64::max);
    let lo = bars.iter().map(|b| b.1).fold(0.0_f64, f64::min);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let plot_h = H - TOP - BOTTOM;
    let y_of = |v: f64| TOP + (hi - v) / span * plot_h;
    let zero = y_of(0.0);
    let slot = (W - LEFT - RIGHT) / bars.len().max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="18">{}</text>"#,
        W / 2.0,
        esc(title)
    );
    for (k, (label, v)) in bars.iter().enumerate() {
        let x = LEFT + k as f64 * slot + 0.15 * slot;
        let (y, h) = if *v >= 0.0 {
            (y_of(*v), zero - y_of(*v))
        } else {
            (zero, y_of(*v) - zero)
        };
        let cx = x + 0.35 * slot;
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{h:.2}" fill="#4a7fb5"/>"##,
            0.7 * slot
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            y - 4.0,
            esc(&format!("{v:.2}"))
        );
        let ly = H - BOTTOM + 14.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{ly:.2}" text-anchor="end" font-size="11" transform="rotate(-40 {cx:.2} {ly:.2})">{}</text>"#,
            esc(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{zero:.2}" x2="{}" y2="{zero:.2}" stroke="black"/>"#,
        W - RIGHT
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        H - BOTTOM
    );
    s.push_str("</svg>\n");
    s
}

/// Values reported for the sustainability-focused optimum in the published
/// reference study. They are not an optimum of the closed-form objective
/// over the default box and are shown only for comparison.
pub const PUBLISHED_OPTIMUM: [(Variable, f64); 4] = [
    (Variable::AiInvestment, 202.48),
    (Variable::EnergyConsumption, 798.9),
    (Variable::CarbonEmissions, 297.8),
    (Variable::WaterUsage, 1499.8),
];
pub const PUBLISHED_OBJECTIVE: f64 = 2.05;

pub fn optimization_table(solver: &OptimizationResult, oracle: &OptimizationResult) -> ReportTable {
    let mut t = ReportTable::new(
        "Optimal deployment strategy",
        &["parameter", "unit", "solver", "corner_oracle", "published_reference"],
    );
    let published = |v: Variable| {
        PUBLISHED_OPTIMUM
            .iter()
            .find(|(p, _)| *p == v)
            .map(|(_, x)| num(*x))
            .unwrap_or_default()
    };
    for v in Variable::ALL {
        t.push(vec![
            v.name().into(),
            v.unit().into(),
            num(solver.optimum.get(v)),
            num(oracle.optimum.get(v)),
            published(v),
        ]);
    }
    t.push(vec![
        "objective".into(),
        String::new(),
        num(solver.objective_value),
        num(oracle.objective_value),
        num(PUBLISHED_OBJECTIVE),
    ]);
    t
}

/// Plain-language comparison of the computed optimum with the published one.
pub fn divergence_note(solver: &OptimizationResult) -> String {
    let mut s = String::from(
        "The published reference optimum lies in the interior of the box, but every partial \
         derivative of the objective has a constant sign there, so the exact maximizer is a \
         corner. Computed vs published:\n",
    );
    for (v, published) in PUBLISHED_OPTIMUM {
        let _ = writeln!(s, "- {}: {} vs {}", v.name(), num(solver.optimum.get(v)), num(published));
    }
    let _ = writeln!(
        s,
        "- objective: {} vs {}",
        num(solver.objective_value),
        num(PUBLISHED_OBJECTIVE)
    );
    s
}

fn strategy_cells(x: &DeploymentStrategy) -> Vec<String> {
    Variable::ALL.iter().map(|&v| num(x.get(v))).collect()
}

pub fn sweep_table(rows: &[WeightSweepRow]) -> ReportTable {
    let mut headers = vec!["configuration", "alpha", "beta", "gamma", "objective"];
    headers.extend(Variable::ALL.iter().map(|v| v.name()));
    headers.extend(["converged", "oracle_gap"]);
    let mut t = ReportTable::new("Weight sensitivity", &headers);
    for r in rows {
        let mut cells = vec![
            r.label.clone(),
            num(r.weights.alpha),
            num(r.weights.beta),
            num(r.weights.gamma),
            num(r.objective),
        ];
        cells.extend(strategy_cells(&r.optimum));
        cells.push(r.converged.to_string());
        cells.push(r.oracle_gap.map(num).unwrap_or_default());
        t.push(cells);
    }
    t
}

pub fn sensitivity_table(rows: &[SensitivityRow]) -> ReportTable {
    let mut t = ReportTable::new(
        "Parameter sensitivity",
        &["parameter", "sensitivity_coefficient_pct", "level", "change_down", "change_up"],
    );
    for r in rows {
        t.push(vec![
            r.parameter.name().into(),
            num(r.coefficient_pct),
            r.level.to_string(),
            num(r.change_down),
            num(r.change_up),
        ]);
    }
    t
}

pub fn baseline_tables(r: &BaselineReport) -> Vec<ReportTable> {
    let mut summary = ReportTable::new(
        "Descriptive statistics",
        &["dataset", "column", "count", "missing", "mean", "std", "min", "max"],
    );
    for s in &r.summaries {
        summary.push(vec![
            s.dataset.clone(),
            s.column.clone(),
            s.summary.count.to_string(),
            s.missing.to_string(),
            num(s.summary.mean),
            num(s.summary.std),
            num(s.summary.min),
            num(s.summary.max),
        ]);
    }
    let mut corr = ReportTable::new(
        "Correlations",
        &["variable_pair", "target", "correlation", "interpretation"],
    );
    for c in &r.correlations {
        corr.push(vec![
            format!("{} / {}", c.a, c.b),
            num(c.target),
            num(c.r),
            c.interpretation.clone(),
        ]);
    }
    let mut trends = ReportTable::new(
        "Trends",
        &["metric", "first_year", "first_year_mean", "last_year", "last_year_mean", "target_slope", "annual_change"],
    );
    for t in &r.trends {
        trends.push(vec![
            t.metric.clone(),
            t.first_year.to_string(),
            num(t.first_year_mean),
            t.last_year.to_string(),
            num(t.last_year_mean),
            num(t.target_slope),
            num(t.slope),
        ]);
    }
    vec![summary, corr, trends]
}

pub fn validation_tables(rows: &[ComponentValidation]) -> Vec<ReportTable> {
    let mut metrics = ReportTable::new(
        "Cross-validated component models",
        &["component", "model", "r2", "r2_std", "mse", "mae", "rmse"],
    );
    let mut imp = ReportTable::new("Feature importance", &["component", "rank", "feature", "importance"]);
    for r in rows {
        metrics.push(vec![
            r.component.clone(),
            r.model.clone(),
            num(r.cv.mean.r2),
            num(r.cv.std.r2),
            num(r.cv.mean.mse),
            num(r.cv.mean.mae),
            num(r.cv.mean.rmse),
        ]);
        for (k, (f, v)) in r.importance.iter().take(5).enumerate() {
            imp.push(vec![r.component.clone(), (k + 1).to_string(), f.clone(), num(*v)]);
        }
    }
    vec![metrics, imp]
}

pub fn comparison_tables(r: &ComparisonReport) -> Vec<ReportTable> {
    let mut m = ReportTable::new(
        "Model comparison",
        &["method", "r2", "r2_std", "mse", "mae", "rmse"],
    );
    for row in &r.methods {
        m.push(vec![
            row.method.clone(),
            num(row.metrics.r2),
            num(row.fold_r2_std),
            num(row.metrics.mse),
            num(row.metrics.mae),
            num(row.metrics.rmse),
        ]);
    }
    let mut s = ReportTable::new(
        "Paired t-tests on absolute residuals",
        &["comparison", "t_statistic", "df", "p_value", "cohens_d", "significant"],
    );
    for row in &r.significance {
        s.push(vec![
            format!("{} vs {}", row.better, row.worse),
            num(row.test.t_statistic),
            row.test.degrees_of_freedom.to_string(),
            num(row.test.p_value),
            num(row.test.cohens_d),
            row.significant.to_string(),
        ]);
    }
    vec![m, s]
}

fn group_table(title: &str, key: &str, columns: &[&str], rows: &[GroupRow]) -> ReportTable {
    let mut headers = vec![key, "count"];
    headers.extend(columns);
    let composite = rows.iter().any(|r| r.composite.is_some());
    if composite {
        headers.push("composite");
    }
    let mut t = ReportTable::new(title, &headers);
    for r in rows {
        let mut cells = vec![r.group.clone(), r.count.to_string()];
        cells.extend(r.means.iter().map(|&m| num(m)));
        if composite {
            cells.push(r.composite.map(num).unwrap_or_default());
        }
        t.push(cells);
    }
    t
}

pub fn sector_table(rows: &[GroupRow]) -> ReportTable {
    group_table("Sector averages", "sector", &SECTOR_COLUMNS, rows)
}

pub fn country_table(rows: &[GroupRow]) -> ReportTable {
    group_table("Top countries by composite", "country", &COUNTRY_COLUMNS, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Value;

    fn sample() -> ReportTable {
        let mut t = ReportTable::new("t", &["name", "value"]);
        t.push(vec!["a|b, \"c\"".into(), num(1.5)]);
        t.push(vec!["d".into(), String::new()]);
        t
    }

    #[test]
    fn markdown_is_pipe_table() {
        let md = sample().to_markdown();
        let lines: Vec<&str> = md.lines().filter(|l| l.starts_with('|')).collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "|---|---|");
        assert!(lines[2].contains("a\\|b"));
    }

    #[test]
    fn csv_round_trips() {
        let t = sample().to_data_table().unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.get(0, 0).as_str(), Some("a|b, \"c\""));
        assert_eq!(t.get(0, 1).as_f64(), Some(1.5));
        assert_eq!(*t.get(1, 1), Value::Missing);
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(num(-0.0), "0.000000");
        assert_eq!(num(-1e-9), "0.000000");
        assert_eq!(num(-0.5), "-0.500000");
    }

    #[test]
    fn svg_has_one_bar_per_value() {
        let svg = bar_chart_svg("x<y", &[("a".into(), 1.0), ("b".into(), -2.0)]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("fill=\"#4a7fb5\"").count(), 2);
        assert!(svg.contains("x&lt;y"));
        assert!(svg.contains("viewBox=\"0 0 800 500\""));
    }
}
