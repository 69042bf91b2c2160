//! Box-constrained maximization of the composite objective.
//!
//! All constraints of the deployment model are simple bounds, so the quadratic
//! subproblem of a sequential quadratic programming iteration reduces to a
//! projected quasi-Newton step: variables that sit (within a shrinking
//! tolerance) on a bound the gradient pushes against are held by a projected
//! gradient step, the remaining free variables take a Newton step on a BFGS
//! model of the curvature, and a backtracking line search along the projected
//! arc enforces an Armijo sufficient-increase condition.
//!
//! The solver works on variables affinely mapped to `[0, 1]`.
//!
//! Two independent oracles validate it: [`corner_oracle`] (sign analysis of
//! the gradient over a 3^9 sample grid) and [`grid_oracle`] (exhaustive
//! evaluation of a uniform grid).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    component_scores, weighted_gradient, weighted_objective, BoundsSet, ComponentScores,
    DeploymentStrategy, ModelCoefficients, ModelError, Variable, WeightConfig,
};

const ARMIJO_C1: f64 = 1e-4;
const BACKTRACK_SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;
/// Upper limit of the tolerance that decides which variables count as bound.
const ACTIVE_SET_EPS: f64 = 1e-2;
const STALL_LIMIT: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("initial point is outside the bounds ({variable} = {value})")]
    InitialOutsideBounds { variable: String, value: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("corner oracle is inapplicable: the partial derivative for {variable} changes sign over the box")]
    OracleInapplicable { variable: Variable },
    #[error("grid oracle needs 2..=6 points per dimension, got {0}")]
    GridSize(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

/// A smooth objective to maximize over a box.
pub trait BoxProblem {
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn value(&self, x: &[f64]) -> Result<f64, SolverError>;
    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<(), SolverError>;

    /// Bound to prefer for variable `i` when its partial derivative is exactly
    /// zero at the solution.
    fn preferred_bound(&self, _i: usize) -> Option<BoundSide> {
        None
    }

    fn dim(&self) -> usize {
        self.lower().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
        }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<(), SolverError> {
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(SolverError::InvalidConfig(
                "tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
    /// Objective value at the start and after every accepted step.
    pub trace: Vec<f64>,
}

/// Affine map between a box and the unit cube. Points at a bound map exactly
/// onto that bound in both directions.
struct UnitScaling<'a> {
    lower: &'a [f64],
    upper: &'a [f64],
}

impl UnitScaling<'_> {
    fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(self.upper))
            .map(|(&xi, (&lo, &hi))| {
                if xi <= lo {
                    0.0
                } else if xi >= hi {
                    1.0
                } else {
                    (xi - lo) / (hi - lo)
                }
            })
            .collect()
    }

    fn unscale(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.lower.iter().zip(self.upper))
            .map(|(&zi, (&lo, &hi))| {
                if zi <= 0.0 {
                    lo
                } else if zi >= 1.0 {
                    hi
                } else {
                    (lo + zi * (hi - lo)).clamp(lo, hi)
                }
            })
            .collect()
    }

    fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }
}

/// Negated objective and its gradient in unit coordinates.
struct UnitObjective<'a, P: BoxProblem + ?Sized> {
    problem: &'a P,
    scaling: UnitScaling<'a>,
}

impl<P: BoxProblem + ?Sized> UnitObjective<'_, P> {
    fn eval(&self, z: &[f64]) -> Result<(f64, Vec<f64>), SolverError> {
        let x = self.scaling.unscale(z);
        let f = -self.problem.value(&x)?;
        let mut grad = vec![0.0; x.len()];
        self.problem.gradient(&x, &mut grad)?;
        let g = grad
            .iter()
            .enumerate()
            .map(|(i, gi)| -gi * self.scaling.width(i))
            .collect();
        Ok((f, g))
    }
}

fn projected_gradient_norm(z: &[f64], g: &[f64]) -> f64 {
    z.iter()
        .zip(g)
        .map(|(&zi, &gi)| (zi - (zi - gi).clamp(0.0, 1.0)).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// First-order optimality residual of `x` for maximization over the box:
/// the infinity norm of the projected gradient in unit coordinates. It is zero
/// exactly when every partial derivative vanishes or pushes its variable
/// against the bound it sits on.
pub fn kkt_residual<P: BoxProblem + ?Sized>(problem: &P, x: &[f64]) -> Result<f64, SolverError> {
    let objective = UnitObjective {
        problem,
        scaling: UnitScaling {
            lower: problem.lower(),
            upper: problem.upper(),
        },
    };
    let z = objective.scaling.to_unit(x);
    let (_, g) = objective.eval(&z)?;
    Ok(projected_gradient_norm(&z, &g))
}

/// Maximizes `problem` over its box starting from `x0`.
///
/// Non-convergence is reported through [`BoxSolution::converged`].
pub fn solve_box<P: BoxProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    options: &SolveOptions,
) -> Result<BoxSolution, SolverError> {
    options.validate()?;
    let n = problem.dim();
    if x0.len() != n || problem.upper().len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    for (i, &xi) in x0.iter().enumerate() {
        if !(xi >= problem.lower()[i] && xi <= problem.upper()[i]) {
            return Err(SolverError::InitialOutsideBounds {
                variable: format!("x[{i}]"),
                value: xi,
            });
        }
    }

    let objective = UnitObjective {
        problem,
        scaling: UnitScaling {
            lower: problem.lower(),
            upper: problem.upper(),
        },
    };

    let mut z = objective.scaling.to_unit(x0);
    let (mut f, mut g) = objective.eval(&z)?;
    let mut trace = vec![-f];
    // None stands for a scaled identity, sized on the free set at each use.
    let mut hessian: Option<DMatrix<f64>> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut stalled_steps = 0;

    while iterations < options.max_iterations {
        let residual = projected_gradient_norm(&z, &g);
        if residual <= options.tolerance {
            converged = true;
            break;
        }

        let eps = ACTIVE_SET_EPS.min(residual);
        let active: Vec<bool> = z
            .iter()
            .zip(&g)
            .map(|(&zi, &gi)| (zi <= eps && gi > 0.0) || (zi >= 1.0 - eps && gi < 0.0))
            .collect();

        let mut step = None;
        for attempt in 0..2 {
            if attempt == 1 {
                if hessian.is_none() {
                    break;
                }
                hessian = None;
            }
            let d = search_direction(&g, &active, hessian.as_ref());
            if let Some(accepted) = line_search(&objective, &z, f, &g, &d)? {
                step = Some(accepted);
                break;
            }
        }
        let Some((z_new, f_new, g_new)) = step else {
            break;
        };

        let s: Vec<f64> = z_new.iter().zip(&z).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        hessian = bfgs_update(hessian, &s, &y);

        if norm_inf(&s) <= options.tolerance {
            stalled_steps += 1;
        } else {
            stalled_steps = 0;
        }

        z = z_new;
        f = f_new;
        g = g_new;
        trace.push(-f);
        iterations += 1;

        if stalled_steps >= STALL_LIMIT {
            break;
        }
    }

    let mut x = objective.scaling.unscale(&z);
    let mut value = problem.value(&x)?;
    apply_tie_breaks(problem, &mut x, &mut value)?;
    if value > *trace.last().unwrap_or(&f64::NEG_INFINITY) {
        trace.push(value);
    }

    let kkt = kkt_residual(problem, &x)?;
    Ok(BoxSolution {
        x,
        value,
        iterations,
        converged: converged && kkt <= options.tolerance,
        kkt_residual: kkt,
        trace,
    })
}

/// Projected quasi-Newton direction in unit coordinates (minimization form).
fn search_direction(g: &[f64], active: &[bool], hessian: Option<&DMatrix<f64>>) -> Vec<f64> {
    let free: Vec<usize> = (0..g.len()).filter(|&i| !active[i]).collect();
    let free_norm = free.iter().map(|&i| g[i] * g[i]).sum::<f64>().sqrt();
    let identity_scale = if free_norm > 0.0 { free_norm } else { 1.0 };

    let mut d = vec![0.0; g.len()];
    for i in 0..g.len() {
        if active[i] {
            let hii = hessian.map_or(identity_scale, |h| h[(i, i)]);
            d[i] = -g[i] / if hii > 0.0 { hii } else { identity_scale };
        }
    }
    if free.is_empty() {
        return d;
    }

    let newton = hessian.and_then(|h| {
        let m = free.len();
        let sub = DMatrix::from_fn(m, m, |r, c| h[(free[r], free[c])]);
        let rhs = DVector::from_iterator(m, free.iter().map(|&i| -g[i]));
        sub.cholesky().map(|chol| chol.solve(&rhs))
    });
    match newton {
        Some(step) if step.iter().zip(&free).map(|(di, &i)| di * g[i]).sum::<f64>() < 0.0 => {
            for (k, &i) in free.iter().enumerate() {
                d[i] = step[k];
            }
        }
        _ => {
            for &i in &free {
                d[i] = -g[i] / identity_scale;
            }
        }
    }
    d
}

type Step = (Vec<f64>, f64, Vec<f64>);

fn line_search<P: BoxProblem + ?Sized>(
    objective: &UnitObjective<'_, P>,
    z: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
) -> Result<Option<Step>, SolverError> {
    let mut t = 1.0;
    for _ in 0..MAX_BACKTRACKS {
        let z_t: Vec<f64> = z
            .iter()
            .zip(d)
            .map(|(&zi, &di)| (zi + t * di).clamp(0.0, 1.0))
            .collect();
        let delta: Vec<f64> = z_t.iter().zip(z).map(|(a, b)| a - b).collect();
        let predicted = dot(g, &delta);
        if predicted < 0.0 {
            let (f_t, g_t) = objective.eval(&z_t)?;
            if f_t <= f + ARMIJO_C1 * predicted {
                return Ok(Some((z_t, f_t, g_t)));
            }
        }
        t *= BACKTRACK_SHRINK;
    }
    Ok(None)
}

fn bfgs_update(hessian: Option<DMatrix<f64>>, s: &[f64], y: &[f64]) -> Option<DMatrix<f64>> {
    let sy = dot(s, y);
    let yy = dot(y, y);
    let ss = dot(s, s);
    let floor = 1e-12 * (ss * yy).sqrt();
    if sy.partial_cmp(&floor) != Some(std::cmp::Ordering::Greater) || sy <= 0.0 {
        // Curvature condition failed: restart from a scaled identity.
        return None;
    }
    let n = s.len();
    let mut h = hessian.unwrap_or_else(|| DMatrix::identity(n, n) * (yy / sy));
    let s_vec = DVector::from_column_slice(s);
    let y_vec = DVector::from_column_slice(y);
    let hs = &h * &s_vec;
    let shs = s_vec.dot(&hs);
    if shs <= 0.0 {
        return None;
    }
    h += &y_vec * y_vec.transpose() / sy - &hs * hs.transpose() / shs;
    Some(h)
}

/// Moves variables with an exactly zero partial derivative to their preferred
/// bound, keeping each move only if the objective does not decrease.
fn apply_tie_breaks<P: BoxProblem + ?Sized>(
    problem: &P,
    x: &mut [f64],
    value: &mut f64,
) -> Result<(), SolverError> {
    let mut grad = vec![0.0; x.len()];
    problem.gradient(x, &mut grad)?;
    for i in 0..x.len() {
        if grad[i] != 0.0 {
            continue;
        }
        let target = match problem.preferred_bound(i) {
            Some(BoundSide::Lower) => problem.lower()[i],
            Some(BoundSide::Upper) => problem.upper()[i],
            None => continue,
        };
        if x[i] == target {
            continue;
        }
        let previous = x[i];
        x[i] = target;
        let candidate = problem.value(x)?;
        if candidate >= *value {
            *value = candidate;
        } else {
            x[i] = previous;
        }
    }
    Ok(())
}

/// The composite objective over a [`BoundsSet`].
pub struct CompositeProblem {
    weights: WeightConfig,
    coefficients: ModelCoefficients,
    lower: [f64; Variable::COUNT],
    upper: [f64; Variable::COUNT],
}

impl CompositeProblem {
    pub fn new(
        weights: WeightConfig,
        coefficients: ModelCoefficients,
        bounds: &BoundsSet,
    ) -> Result<Self, SolverError> {
        weights.validate()?;
        Ok(Self::unchecked(weights, coefficients, bounds)?)
    }

    /// Accepts weights off the simplex (used to check argmax invariance
    /// under rescaling of the weights).
    pub fn unchecked(
        weights: WeightConfig,
        coefficients: ModelCoefficients,
        bounds: &BoundsSet,
    ) -> Result<Self, ModelError> {
        bounds.validate()?;
        Ok(Self {
            weights,
            coefficients,
            lower: bounds.lower(),
            upper: bounds.upper(),
        })
    }

    fn strategy(x: &[f64]) -> DeploymentStrategy {
        let mut a = [0.0; Variable::COUNT];
        a.copy_from_slice(x);
        DeploymentStrategy::from_array(a)
    }
}

impl BoxProblem for CompositeProblem {
    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn value(&self, x: &[f64]) -> Result<f64, SolverError> {
        Ok(weighted_objective(
            &Self::strategy(x),
            &self.weights,
            &self.coefficients,
        )?)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<(), SolverError> {
        let g = weighted_gradient(&Self::strategy(x), &self.weights, &self.coefficients)?;
        grad.copy_from_slice(&g);
        Ok(())
    }

    fn preferred_bound(&self, i: usize) -> Option<BoundSide> {
        Some(if Variable::ALL[i].is_cost() {
            BoundSide::Lower
        } else {
            BoundSide::Upper
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_strategy: DeploymentStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
            initial_strategy: DeploymentStrategy {
                ai_adoption: 5.0,
                renewable_energy: 50.0,
                efficiency_gain: 40.0,
                innovation_index: 60.0,
                market_stability: 6.0,
                ai_investment: 200.0,
                energy_consumption: 800.0,
                carbon_emissions: 300.0,
                water_usage: 1500.0,
            },
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub optimum: DeploymentStrategy,
    pub objective_value: f64,
    pub component_scores: ComponentScores,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
}

impl OptimizationResult {
    fn at(
        problem: &CompositeProblem,
        optimum: DeploymentStrategy,
        iterations: usize,
        converged: bool,
    ) -> Result<Self, SolverError> {
        let kkt = kkt_residual(problem, &optimum.to_array())?;
        Ok(Self {
            optimum,
            objective_value: weighted_objective(
                &optimum,
                &problem.weights,
                &problem.coefficients,
            )?,
            component_scores: component_scores(&optimum, &problem.coefficients)?,
            iterations,
            converged,
            kkt_residual: kkt,
        })
    }
}

/// Maximizes the composite objective over the box `b`.
pub fn maximize(
    w: &WeightConfig,
    c: &ModelCoefficients,
    b: &BoundsSet,
    cfg: &SolverConfig,
) -> Result<OptimizationResult, SolverError> {
    maximize_traced(w, c, b, cfg).map(|(result, _)| result)
}

/// Like [`maximize`], also returning the objective value of every iterate.
pub fn maximize_traced(
    w: &WeightConfig,
    c: &ModelCoefficients,
    b: &BoundsSet,
    cfg: &SolverConfig,
) -> Result<(OptimizationResult, Vec<f64>), SolverError> {
    let problem = CompositeProblem::new(*w, *c, b)?;
    if let Some(v) = b.first_violation(&cfg.initial_strategy) {
        return Err(SolverError::InitialOutsideBounds {
            variable: v.name().to_string(),
            value: cfg.initial_strategy.get(v),
        });
    }
    let solution = solve_box(&problem, &cfg.initial_strategy.to_array(), &cfg.options())?;
    let optimum = b.project(&CompositeProblem::strategy(&solution.x));
    let result =
        OptimizationResult::at(&problem, optimum, solution.iterations, solution.converged)?;
    Ok((result, solution.trace))
}

/// Exact optimum of a coordinate-wise monotone objective: the box corner that
/// takes, per variable, the bound favored by the sign of its partial.
///
/// Monotonicity is checked on the 3^9 grid of lower bound, midpoint and upper
/// bound; any sign change is reported as [`SolverError::OracleInapplicable`].
/// Variables whose partial is zero everywhere take the lower bound when they are
/// cost variables and the upper bound otherwise.
pub fn corner_oracle(
    w: &WeightConfig,
    c: &ModelCoefficients,
    b: &BoundsSet,
) -> Result<OptimizationResult, SolverError> {
    let problem = CompositeProblem::new(*w, *c, b)?;
    let levels: Vec<[f64; 3]> = Variable::ALL
        .iter()
        .map(|&v| {
            let i = b.get(v);
            [i.lower, 0.5 * (i.lower + i.upper), i.upper]
        })
        .collect();

    let mut positive = [false; Variable::COUNT];
    let mut negative = [false; Variable::COUNT];
    let total = 3usize.pow(Variable::COUNT as u32);
    let mut x = [0.0; Variable::COUNT];
    let mut grad = [0.0; Variable::COUNT];
    for index in 0..total {
        let mut rest = index;
        for d in (0..Variable::COUNT).rev() {
            x[d] = levels[d][rest % 3];
            rest /= 3;
        }
        problem.gradient(&x, &mut grad)?;
        for d in 0..Variable::COUNT {
            positive[d] |= grad[d] > 0.0;
            negative[d] |= grad[d] < 0.0;
        }
    }

    let mut corner = [0.0; Variable::COUNT];
    for v in Variable::ALL {
        let d = v.index();
        if positive[d] && negative[d] {
            return Err(SolverError::OracleInapplicable { variable: v });
        }
        let interval = b.get(v);
        corner[d] = if positive[d] {
            interval.upper
        } else if negative[d] || v.is_cost() {
            interval.lower
        } else {
            interval.upper
        };
    }
    let optimum = DeploymentStrategy::from_array(corner);
    let mut result = OptimizationResult::at(&problem, optimum, 0, true)?;
    result.converged = result.kkt_residual <= SolveOptions::default().tolerance;
    Ok(result)
}

/// Brute-force maximum over the uniform grid with `points_per_dim` points per
/// variable, both bounds included. Ties go to the lowest lexicographic grid
/// index, so the result does not depend on the thread count.
pub fn grid_oracle(
    w: &WeightConfig,
    c: &ModelCoefficients,
    b: &BoundsSet,
    points_per_dim: usize,
) -> Result<OptimizationResult, SolverError> {
    if !(2..=6).contains(&points_per_dim) {
        return Err(SolverError::GridSize(points_per_dim));
    }
    let problem = CompositeProblem::new(*w, *c, b)?;
    let p = points_per_dim;
    let axes: Vec<Vec<f64>> = Variable::ALL
        .iter()
        .map(|&v| {
            let i = b.get(v);
            (0..p)
                .map(|k| {
                    if k == p - 1 {
                        i.upper
                    } else {
                        i.lower + (k as f64) * i.width() / ((p - 1) as f64)
                    }
                })
                .collect()
        })
        .collect();

    let total = p.pow(Variable::COUNT as u32);
    const CHUNK: usize = 1 << 14;
    let n_chunks = total.div_ceil(CHUNK);
    let chunk_best: Vec<Option<(f64, usize)>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Option<(f64, usize)>, SolverError> {
            let mut best: Option<(f64, usize)> = None;
            let mut x = [0.0; Variable::COUNT];
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                decode(index, p, &axes, &mut x);
                let value = problem.value(&x)?;
                if best.is_none_or(|(b, _)| value > b) {
                    best = Some((value, index));
                }
            }
            Ok(best)
        })
        .collect::<Result<_, _>>()?;

    let (_, best_index) = chunk_best
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, usize)>, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        })
        .expect("grid has at least one point");

    let mut x = [0.0; Variable::COUNT];
    decode(best_index, p, &axes, &mut x);
    let mut result =
        OptimizationResult::at(&problem, DeploymentStrategy::from_array(x), 0, true)?;
    result.converged = result.kkt_residual <= SolveOptions::default().tolerance;
    Ok(result)
}

fn decode(mut index: usize, p: usize, axes: &[Vec<f64>], x: &mut [f64; Variable::COUNT]) {
    for d in (0..Variable::COUNT).rev() {
        x[d] = axes[d][index % p];
        index /= p;
    }
}
