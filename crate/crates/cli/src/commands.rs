use std::fs::File;
use std::path::Path;

use ecoopt_core::datagen::{
    builtin_specs, generate_with_report, inject_missing_except, sustainability_spec,
    entrepreneurship_spec, GenerationReport, GeneratorSpec, YEAR_COLUMN,
};
use ecoopt_core::experiments::{self, SurrogateData};
use ecoopt_core::report::{self, ReportTable};
use ecoopt_core::seed::derive_seeds;
use ecoopt_core::sensitivity::{parameter_sensitivity, sweep_weights};
use ecoopt_core::table::DataTable;
use ecoopt_core::{corner_oracle, maximize, OptimizationResult, Variable, WeightConfig};
use serde::Serialize;

use crate::args::{ExperimentArgs, ExperimentName, GenDataArgs, SensitivityArgs, WeightArgs};
use crate::config::Settings;
use crate::error::CliError;
use crate::output::{Manifest, OutputDir};

/// Coordinate and objective tolerance for solver/oracle agreement, relative
/// to each variable's range.
pub const AGREEMENT_TOLERANCE: f64 = 1e-4;

fn markdown(tables: &[ReportTable], notes: &[String]) -> String {
    let mut s = String::new();
    for t in tables {
        s.push_str(&t.to_markdown());
        s.push('\n');
    }
    for n in notes {
        s.push_str(n.trim_end());
        s.push_str("\n\n");
    }
    s
}

fn slug(title: &str) -> String {
    let mut s: String = title
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    while s.contains("__") {
        s = s.replace("__", "_");
    }
    s.trim_matches('_').to_string()
}

fn write_tables(out: &mut OutputDir, prefix: &str, tables: &[ReportTable], notes: &[String]) -> Result<(), CliError> {
    for t in tables {
        out.write(&format!("{prefix}-{}.csv", slug(&t.title)), t.to_csv())?;
    }
    out.write(&format!("{prefix}.md"), markdown(tables, notes))
}

fn finish<T: Serialize>(out: &mut OutputDir, s: &Settings, command: &str, name: &str, details: T) -> Result<(), CliError> {
    let files = out.written().to_vec();
    out.write_json(name, &Manifest::new(command, s.seed, s.timestamp, &files, details))?;
    println!("wrote {} files to {}", files.len() + 1, out.root().display());
    Ok(())
}

// ---- gen-data -------------------------------------------------------------

#[derive(Serialize)]
struct DatasetEntry {
    file: String,
    rows: usize,
    missing_cells: usize,
    report: GenerationReport,
}

fn load_specs(path: &Path) -> Result<Vec<GeneratorSpec>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read spec {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let specs = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|s| vec![s])
    };
    specs.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn gen_data(s: &Settings, a: &GenDataArgs) -> Result<(), CliError> {
    let specs: Vec<GeneratorSpec> = if let Some(p) = &a.spec {
        load_specs(p)?
    } else if a.all || a.dataset.is_empty() {
        builtin_specs(s.seed)
    } else {
        builtin_specs(s.seed)
            .into_iter()
            .filter(|sp| a.dataset.contains(&sp.name))
            .collect()
    };
    for sp in &specs {
        sp.validate()?;
    }
    let missing = a.missing.or(s.missing_fraction);
    let mut out = OutputDir::prepare(&s.out)?;
    let mut entries = Vec::new();
    for sp in &specs {
        let (mut t, report) = generate_with_report(sp)?;
        if let Some(f) = missing {
            let protected: Vec<&str> = t
                .columns()
                .iter()
                .map(|c| c.name.as_str())
                .filter(|n| *n == YEAR_COLUMN)
                .collect();
            t = inject_missing_except(&t, f, derive_seeds(sp.seed, 2)[1], &protected)?;
        }
        let file = format!("{}.csv", sp.name);
        out.write(&file, t.to_csv_string())?;
        entries.push(DatasetEntry {
            file,
            rows: t.n_rows(),
            missing_cells: t.missing_count(),
            report,
        });
    }
    #[derive(Serialize)]
    struct Details {
        missing_fraction: Option<f64>,
        datasets: Vec<DatasetEntry>,
    }
    finish(&mut out, s, "gen-data", "manifest.json", Details {
        missing_fraction: missing,
        datasets: entries,
    })
}

// ---- optimize -------------------------------------------------------------

#[derive(Serialize)]
struct OptimizeReport {
    weights: WeightConfig,
    coefficients: ecoopt_core::ModelCoefficients,
    solver: OptimizationResult,
    oracle: Option<OptimizationResult>,
    oracle_error: Option<String>,
    agreement: bool,
    reference_note: String,
}

fn agrees(s: &Settings, a: &OptimizationResult, b: &OptimizationResult) -> bool {
    (a.objective_value - b.objective_value).abs() < AGREEMENT_TOLERANCE
        && Variable::ALL.iter().all(|&v| {
            (a.optimum.get(v) - b.optimum.get(v)).abs()
                <= AGREEMENT_TOLERANCE * s.bounds.get(v).width()
        })
}

pub fn optimize(s: &Settings, a: &WeightArgs) -> Result<(), CliError> {
    let w = a.weights.unwrap_or(s.weights);
    let solved = maximize(&w, &s.coefficients, &s.bounds, &s.solver)?;
    let (oracle, oracle_error) = match corner_oracle(&w, &s.coefficients, &s.bounds) {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let agreement = oracle.as_ref().is_some_and(|o| agrees(s, &solved, o));
    let note = report::divergence_note(&solved);
    let mut out = OutputDir::prepare(&s.out)?;
    let table = report::optimization_table(&solved, oracle.as_ref().unwrap_or(&solved));
    let mut notes = vec![format!(
        "Solver converged: {}. KKT residual: {:.3e}. Agreement with corner oracle: {}.",
        solved.converged, solved.kkt_residual, agreement
    )];
    if let Some(e) = &oracle_error {
        notes.push(format!("Corner oracle not applicable: {e}"));
    }
    notes.push(note.clone());
    write_tables(&mut out, "optimize", std::slice::from_ref(&table), &notes)?;
    out.write_json("optimize.json", &OptimizeReport {
        weights: w,
        coefficients: s.coefficients,
        solver: solved,
        oracle,
        oracle_error,
        agreement,
        reference_note: note,
    })?;
    println!(
        "objective {} (converged: {}, oracle agreement: {})",
        report::num(solved.objective_value),
        solved.converged,
        agreement
    );
    finish(&mut out, s, "optimize", "optimize.manifest.json", ())
}

// ---- sweep and sensitivity ------------------------------------------------

pub fn sweep(s: &Settings) -> Result<(), CliError> {
    let rows = sweep_weights(&s.weight_configs, &s.coefficients, &s.bounds, &s.solver)?;
    let identical = rows.windows(2).all(|p| p[0].optimum == p[1].optimum);
    let mut out = OutputDir::prepare(&s.out)?;
    write_tables(
        &mut out,
        "sweep",
        &[report::sweep_table(&rows)],
        &[format!("Identical optimal strategy across configurations: {identical}.")],
    )?;
    out.write_json("sweep.json", &rows)?;
    finish(&mut out, s, "sweep", "sweep.manifest.json", ())
}

pub fn sensitivity(s: &Settings, a: &SensitivityArgs) -> Result<(), CliError> {
    let w = a.weights.weights.unwrap_or(s.weights);
    let delta = a.delta.unwrap_or(s.delta);
    let opt = maximize(&w, &s.coefficients, &s.bounds, &s.solver)?;
    let rows = parameter_sensitivity(&opt.optimum, &w, &s.coefficients, &s.bounds, delta, &s.thresholds)?;
    let mut out = OutputDir::prepare(&s.out)?;
    let table = report::sensitivity_table(&rows);
    write_tables(
        &mut out,
        "sensitivity",
        std::slice::from_ref(&table),
        &[format!("Perturbation: +/-{}% of each variable, clamped to its bounds.", delta * 100.0)],
    )?;
    out.write_json("sensitivity.json", &rows)?;
    if !a.no_svg {
        let bars: Vec<(String, f64)> = rows
            .iter()
            .map(|r| (r.parameter.name().to_string(), r.coefficient_pct))
            .collect();
        out.write("sensitivity.svg", report::bar_chart_svg("Sensitivity coefficient (%)", &bars))?;
    }
    finish(&mut out, s, "sensitivity", "sensitivity.manifest.json", ())
}

// ---- experiments ----------------------------------------------------------

fn load_or_generate(s: &Settings, data: Option<&Path>, spec: GeneratorSpec) -> Result<DataTable, CliError> {
    match data {
        Some(dir) => {
            let path = dir.join(format!("{}.csv", spec.name));
            let f = File::open(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Ok(DataTable::read_csv(spec.name.clone(), f)?)
        }
        None => {
            debug_assert_eq!(spec.seed, s.seed);
            Ok(generate_with_report(&spec)?.0)
        }
    }
}

fn surrogate_inputs(s: &Settings, out: &mut OutputDir, t: &DataTable, w: &WeightConfig) -> Result<SurrogateData, CliError> {
    let pipeline = ecoopt_core::preprocess::fit(t, &s.pipeline)?;
    out.write_json("pipeline.json", &pipeline)?;
    let clean = pipeline.transform(t)?;
    Ok(experiments::surrogate_data(&clean, w, &s.coefficients, &s.bounds, s.seed)?)
}

pub fn experiment(s: &Settings, a: &ExperimentArgs) -> Result<(), CliError> {
    let data = a.data.as_deref().or(s.data_dir.as_deref());
    let w = a.weights.weights.unwrap_or(s.weights);
    let name = a.name.as_str();
    let mut out = OutputDir::prepare(&s.out)?;
    let prefix = format!("experiment-{name}");
    match a.name {
        ExperimentName::Baseline => {
            let tables = builtin_specs(s.seed)
                .into_iter()
                .map(|sp| load_or_generate(s, data, sp))
                .collect::<Result<Vec<_>, _>>()?;
            let r = experiments::baseline(&tables, &sustainability_spec(s.seed))?;
            write_tables(&mut out, &prefix, &report::baseline_tables(&r), &[])?;
            out.write_json(&format!("{prefix}.json"), &r)?;
        }
        ExperimentName::Validate => {
            let t = load_or_generate(s, data, sustainability_spec(s.seed))?;
            let d = surrogate_inputs(s, &mut out, &t, &w)?;
            let r = experiments::validate(&d, s.seed)?;
            write_tables(&mut out, &prefix, &report::validation_tables(&r), &[])?;
            out.write_json(&format!("{prefix}.json"), &r)?;
        }
        ExperimentName::Compare => {
            let t = load_or_generate(s, data, sustainability_spec(s.seed))?;
            let d = surrogate_inputs(s, &mut out, &t, &w)?;
            let r = experiments::compare(&d, s.seed)?;
            let r2: Vec<f64> = r.methods.iter().take(3).map(|m| m.metrics.r2).collect();
            let ordered = r2[0] < r2[1] && r2[1] < r2[2];
            let note = format!(
                "Cross-validated R2 ordering linear < forest < boosting: {}.",
                if ordered { "holds" } else { "does not hold" }
            );
            write_tables(&mut out, &prefix, &report::comparison_tables(&r), &[note])?;
            out.write_json(&format!("{prefix}.json"), &r)?;
        }
        ExperimentName::Sectors => {
            let t = load_or_generate(s, data, entrepreneurship_spec(s.seed))?;
            let r = experiments::sectors(&t)?;
            write_tables(&mut out, &prefix, &[report::sector_table(&r)], &[])?;
            out.write_json(&format!("{prefix}.json"), &r)?;
        }
        ExperimentName::Countries => {
            let t = load_or_generate(s, data, sustainability_spec(s.seed))?;
            let r = experiments::countries(&t, 10)?;
            let note = "Composite is the unweighted mean of the three displayed columns.".to_string();
            write_tables(&mut out, &prefix, &[report::country_table(&r)], &[note])?;
            out.write_json(&format!("{prefix}.json"), &r)?;
        }
    }
    finish(&mut out, s, &format!("experiment {name}"), &format!("{prefix}.manifest.json"), ())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("Paired t-tests on absolute residuals"), "paired_t_tests_on_absolute_residuals");
        assert_eq!(slug("  Top -- countries "), "top_countries");
    }
}
