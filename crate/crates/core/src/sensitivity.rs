//! Weight sweeps and one-at-a-time parameter sensitivity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    weighted_objective, BoundsSet, DeploymentStrategy, ModelCoefficients, ModelError, Variable,
    WeightConfig,
};
use crate::solver::{corner_oracle, maximize, SolverConfig, SolverError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SensitivityError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("objective is zero at the baseline; relative changes are undefined")]
    DegenerateBaseline,
    #[error("delta fraction must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("baseline strategy is outside the bounds ({0})")]
    BaselineOutsideBounds(Variable),
}

/// The five weight configurations of the robustness study.
pub fn default_weight_configs() -> Vec<(String, WeightConfig)> {
    [
        ("Sustainability-focused", 0.60, 0.30, 0.10),
        ("Resilience-focused", 0.30, 0.60, 0.10),
        ("Environment-focused", 0.20, 0.20, 0.60),
        ("Balanced", 0.33, 0.33, 0.34),
        ("Sustainability-resilience", 0.50, 0.40, 0.10),
    ]
    .into_iter()
    .map(|(label, a, b, g)| {
        (
            label.to_string(),
            WeightConfig::new(a, b, g).expect("built-in weights lie on the simplex"),
        )
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSweepRow {
    pub label: String,
    pub weights: WeightConfig,
    pub objective: f64,
    pub optimum: DeploymentStrategy,
    pub converged: bool,
    /// `|solver objective - corner oracle objective|`; `None` when the
    /// oracle does not apply (non-monotone coefficients).
    pub oracle_gap: Option<f64>,
}

pub fn sweep_weights(
    configs: &[(String, WeightConfig)],
    c: &ModelCoefficients,
    b: &BoundsSet,
    cfg: &SolverConfig,
) -> Result<Vec<WeightSweepRow>, SensitivityError> {
    configs
        .iter()
        .map(|(label, w)| {
            let result = maximize(w, c, b, cfg)?;
            let oracle_gap = match corner_oracle(w, c, b) {
                Ok(oracle) => Some((result.objective_value - oracle.objective_value).abs()),
                Err(SolverError::OracleInapplicable { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(WeightSweepRow {
                label: label.clone(),
                weights: *w,
                objective: result.objective_value,
                optimum: result.optimum,
                converged: result.converged,
                oracle_gap,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SensitivityLevel {
    Low,
    Medium,
    High,
}

impl std::fmt::Display for SensitivityLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SensitivityLevel::Low => "Low",
            SensitivityLevel::Medium => "Medium",
            SensitivityLevel::High => "High",
        })
    }
}

/// Percent thresholds separating the sensitivity levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelThresholds {
    pub high: f64,
    pub medium: f64,
}

impl Default for LevelThresholds {
    fn default() -> Self {
        Self {
            high: 10.0,
            medium: 5.0,
        }
    }
}

impl LevelThresholds {
    pub fn classify(&self, coefficient_pct: f64) -> SensitivityLevel {
        if coefficient_pct >= self.high {
            SensitivityLevel::High
        } else if coefficient_pct >= self.medium {
            SensitivityLevel::Medium
        } else {
            SensitivityLevel::Low
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub parameter: Variable,
    pub coefficient_pct: f64,
    pub level: SensitivityLevel,
    /// Objective change for `v * (1 - delta)`, clamped to bounds.
    pub change_down: f64,
    /// Objective change for `v * (1 + delta)`, clamped to bounds.
    pub change_up: f64,
}

/// Relative objective change when each variable alone is scaled by
/// `1 ± delta_fraction` (clamped to its bounds). Rows are sorted by
/// descending coefficient; ties keep variable order.
pub fn parameter_sensitivity(
    x_star: &DeploymentStrategy,
    w: &WeightConfig,
    c: &ModelCoefficients,
    b: &BoundsSet,
    delta_fraction: f64,
    thresholds: &LevelThresholds,
) -> Result<Vec<SensitivityRow>, SensitivityError> {
    if !(delta_fraction > 0.0 && delta_fraction < 1.0) {
        return Err(SensitivityError::InvalidDelta(delta_fraction));
    }
    w.validate()?;
    if let Some(v) = b.first_violation(x_star) {
        return Err(SensitivityError::BaselineOutsideBounds(v));
    }
    let base = weighted_objective(x_star, w, c)?;
    if base == 0.0 {
        return Err(SensitivityError::DegenerateBaseline);
    }

    let mut rows = Vec::with_capacity(Variable::COUNT);
    for v in Variable::ALL {
        let interval = b.get(v);
        let value = x_star.get(v);
        let change = |factor: f64| -> Result<f64, ModelError> {
            let perturbed = x_star.with(v, interval.clamp(value * factor));
            Ok(weighted_objective(&perturbed, w, c)? - base)
        };
        let change_down = change(1.0 - delta_fraction)?;
        let change_up = change(1.0 + delta_fraction)?;
        let coefficient_pct = 100.0 * change_down.abs().max(change_up.abs()) / base.abs();
        rows.push(SensitivityRow {
            parameter: v,
            coefficient_pct,
            level: thresholds.classify(coefficient_pct),
            change_down,
            change_up,
        });
    }
    rows.sort_by(|a, b| b.coefficient_pct.total_cmp(&a.coefficient_pct));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const CORNER: [f64; 9] = [10.0, 100.0, 80.0, 100.0, 10.0, 1000.0, 50.0, 20.0, 100.0];

    fn corner_rows(delta: f64) -> Vec<SensitivityRow> {
        parameter_sensitivity(
            &DeploymentStrategy::from_array(CORNER),
            &WeightConfig::default(),
            &ModelCoefficients::default(),
            &BoundsSet::default(),
            delta,
            &LevelThresholds::default(),
        )
        .unwrap()
    }

    fn row(rows: &[SensitivityRow], v: Variable) -> SensitivityRow {
        *rows.iter().find(|r| r.parameter == v).unwrap()
    }

    #[test]
    fn corner_sensitivities() {
        let rows = corner_rows(0.5);
        // ai 10 -> 5 removes 0.6 * 0.6 * 5 ln 2 from F = 2.946730.
        assert_abs_diff_eq!(row(&rows, Variable::AiAdoption).coefficient_pct, 42.34, epsilon = 0.01);
        assert_abs_diff_eq!(
            row(&rows, Variable::RenewableEnergy).coefficient_pct,
            35.15,
            epsilon = 0.01
        );
        assert_abs_diff_eq!(row(&rows, Variable::WaterUsage).coefficient_pct, 0.00679, epsilon = 1e-4);
        assert_eq!(rows[0].parameter, Variable::AiAdoption);
        assert_eq!(rows[1].parameter, Variable::RenewableEnergy);
        assert_eq!(rows.last().unwrap().parameter, Variable::WaterUsage);
        assert_eq!(rows[0].level, SensitivityLevel::High);
    }

    #[test]
    fn clamped_directions_have_no_effect() {
        let rows = corner_rows(0.5);
        for v in Variable::ALL {
            let r = row(&rows, v);
            if v.is_cost() {
                assert_eq!(r.change_down, 0.0, "{v} sits at its lower bound");
            } else {
                assert_eq!(r.change_up, 0.0, "{v} sits at its upper bound");
            }
        }
    }

    #[test]
    fn smaller_delta_shrinks_linear_terms() {
        let half = corner_rows(0.5);
        let quarter = corner_rows(0.25);
        for v in [
            Variable::InnovationIndex,
            Variable::MarketStability,
            Variable::EnergyConsumption,
            Variable::CarbonEmissions,
            Variable::WaterUsage,
        ] {
            assert!(row(&quarter, v).coefficient_pct < row(&half, v).coefficient_pct);
        }
    }

    #[test]
    fn invalid_inputs() {
        let x = DeploymentStrategy::from_array(CORNER);
        let w = WeightConfig::default();
        let c = ModelCoefficients::default();
        let b = BoundsSet::default();
        let t = LevelThresholds::default();
        assert_eq!(
            parameter_sensitivity(&x, &w, &c, &b, 1.0, &t),
            Err(SensitivityError::InvalidDelta(1.0))
        );
        let outside = x.with(Variable::WaterUsage, 1.0);
        assert_eq!(
            parameter_sensitivity(&outside, &w, &c, &b, 0.5, &t),
            Err(SensitivityError::BaselineOutsideBounds(Variable::WaterUsage))
        );
        // S > 0 everywhere in the default box, so zero it through the coefficients.
        let zero = ModelCoefficients {
            a1: 0.0,
            a2: 0.0,
            ..c
        };
        let w_s = WeightConfig::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            parameter_sensitivity(&x, &w_s, &zero, &b, 0.5, &t),
            Err(SensitivityError::DegenerateBaseline)
        );
    }

    #[test]
    fn cost_variables_match_closed_form() {
        let rows = corner_rows(0.5);
        let c = ModelCoefficients::default();
        let gamma = WeightConfig::default().gamma;
        let base = 2.946_730_f64;
        let f = crate::model::composite_objective(
            &DeploymentStrategy::from_array(CORNER),
            &WeightConfig::default(),
            &c,
        )
        .unwrap();
        assert_abs_diff_eq!(f, base, epsilon = 1e-5);
        for (v, g, norm) in [
            (Variable::EnergyConsumption, c.g1, c.norm_energy),
            (Variable::CarbonEmissions, c.g2, c.norm_carbon),
            (Variable::WaterUsage, c.g3, c.norm_water),
        ] {
            let dv = 0.5 * CORNER[v.index()];
            let expected = 100.0 * gamma * g * dv / norm / f.abs();
            assert_abs_diff_eq!(row(&rows, v).coefficient_pct, expected, epsilon = 1e-9);
        }
    }

    #[test]
    fn thresholds_classify() {
        let t = LevelThresholds::default();
        assert_eq!(t.classify(10.0), SensitivityLevel::High);
        assert_eq!(t.classify(9.99), SensitivityLevel::Medium);
        assert_eq!(t.classify(5.0), SensitivityLevel::Medium);
        assert_eq!(t.classify(4.0), SensitivityLevel::Low);
    }

    #[test]
    fn sweep_of_defaults() {
        let rows = sweep_weights(
            &default_weight_configs(),
            &ModelCoefficients::default(),
            &BoundsSet::default(),
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert_eq!(r.optimum.to_array(), CORNER, "{}", r.label);
            assert!(r.oracle_gap.unwrap() < 1e-4);
        }
        assert_abs_diff_eq!(rows[0].objective, 2.94673, epsilon = 1e-4);
        assert_abs_diff_eq!(rows[3].objective, 1.77943, epsilon = 1e-4);
    }
}
