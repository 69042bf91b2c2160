use ecoopt_core::sensitivity::{
    default_weight_configs, parameter_sensitivity, sweep_weights, LevelThresholds,
};
use ecoopt_core::solver::{maximize_traced, CompositeProblem};
use ecoopt_core::{
    composite_objective, corner_oracle, grid_oracle, maximize, BoundsSet, DeploymentStrategy,
    ModelCoefficients, SolverConfig, Variable, WeightConfig,
};
use proptest::prelude::*;

const CORNER: [f64; 9] = [10.0, 100.0, 80.0, 100.0, 10.0, 1000.0, 50.0, 20.0, 100.0];

#[test]
fn solver_agrees_with_corner_oracle_for_all_configs() {
    let (c, b) = (ModelCoefficients::default(), BoundsSet::default());
    for (label, w) in default_weight_configs() {
        let s = maximize(&w, &c, &b, &SolverConfig::default()).unwrap();
        let o = corner_oracle(&w, &c, &b).unwrap();
        assert!(s.converged, "{label}");
        assert!((s.objective_value - o.objective_value).abs() < 1e-4, "{label}");
        for v in Variable::ALL {
            let tol = 1e-4 * b.get(v).width();
            assert!((s.optimum.get(v) - o.optimum.get(v)).abs() <= tol, "{label} {v}");
        }
        assert_eq!(o.optimum.to_array(), CORNER, "{label}");
        assert!(b.contains(&s.optimum));
    }
}

#[test]
fn five_point_grid_never_beats_solver() {
    let (c, b) = (ModelCoefficients::default(), BoundsSet::default());
    let w = WeightConfig::default();
    let s = maximize(&w, &c, &b, &SolverConfig::default()).unwrap();
    let g = grid_oracle(&w, &c, &b, 5).unwrap();
    assert!(g.objective_value <= s.objective_value + 1e-9);
    assert_eq!(g.optimum.to_array(), CORNER);
}

#[test]
fn reference_objective_values() {
    let (c, b) = (ModelCoefficients::default(), BoundsSet::default());
    let x = DeploymentStrategy::from_array(CORNER);
    let f = composite_objective(&x, &WeightConfig::default(), &c).unwrap();
    // 0.6 (6 ln 2 + 0.256) + 0.3 - 0.1 (0.01 + 0.008 + 0.004)
    let hand = 0.6 * (6.0 * std::f64::consts::LN_2 + 0.256) + 0.3 - 0.1 * 0.022;
    assert!((f - hand).abs() < 1e-12);
    assert!((f - 2.94673).abs() < 1e-5);
    let balanced = WeightConfig::new(0.33, 0.33, 0.34).unwrap();
    let r = maximize(&balanced, &c, &b, &SolverConfig::default()).unwrap();
    assert!((r.objective_value - 1.77943).abs() < 1e-4);
}

#[test]
fn iterates_improve_and_repeat() {
    let (c, b) = (ModelCoefficients::default(), BoundsSet::default());
    let w = WeightConfig::new(0.2, 0.2, 0.6).unwrap();
    let (r1, t1) = maximize_traced(&w, &c, &b, &SolverConfig::default()).unwrap();
    let (r2, t2) = maximize_traced(&w, &c, &b, &SolverConfig::default()).unwrap();
    assert!(t1.windows(2).all(|p| p[1] >= p[0]));
    assert_eq!(t1, t2);
    assert_eq!(r1, r2);
}

#[test]
fn sweep_optima_coincide() {
    let rows = sweep_weights(
        &default_weight_configs(),
        &ModelCoefficients::default(),
        &BoundsSet::default(),
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert_eq!(r.optimum, rows[0].optimum, "{}", r.label);
        assert!(r.oracle_gap.unwrap() < 1e-4);
    }
}

#[test]
fn sensitivity_extremes_for_every_config() {
    let (c, b) = (ModelCoefficients::default(), BoundsSet::default());
    let x = DeploymentStrategy::from_array(CORNER);
    for (label, w) in default_weight_configs() {
        let rows = parameter_sensitivity(&x, &w, &c, &b, 0.5, &LevelThresholds::default()).unwrap();
        let top: Vec<Variable> = rows.iter().take(2).map(|r| r.parameter).collect();
        assert!(top.contains(&Variable::AiAdoption), "{label}");
        assert!(top.contains(&Variable::RenewableEnergy), "{label}");
        assert_eq!(rows.last().unwrap().parameter, Variable::WaterUsage, "{label}");
        assert!(rows.windows(2).all(|p| p[0].coefficient_pct >= p[1].coefficient_pct));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn argmax_survives_weight_rescaling(a in 0.05..0.9f64, frac in 0.05..0.95f64, k in 0.1..20.0f64) {
        let (c, b) = (ModelCoefficients::default(), BoundsSet::default());
        let beta = (1.0 - a) * frac;
        let w = WeightConfig::new(a, beta, 1.0 - a - beta).unwrap();
        let s = maximize(&w, &c, &b, &SolverConfig::default()).unwrap();
        let scaled = CompositeProblem::unchecked(
            WeightConfig::unchecked(k * w.alpha, k * w.beta, k * w.gamma), c, &b).unwrap();
        let sol = ecoopt_core::solver::solve_box(
            &scaled, &SolverConfig::default().initial_strategy.to_array(), &SolverConfig::default().options()).unwrap();
        for v in Variable::ALL {
            let tol = 1e-4 * b.get(v).width();
            prop_assert!((sol.x[v.index()] - s.optimum.get(v)).abs() <= tol);
            prop_assert!((s.optimum.get(v) - CORNER[v.index()]).abs() <= tol);
        }
    }
}
