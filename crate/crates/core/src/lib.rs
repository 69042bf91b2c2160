//! Weighted multi-objective model of AI deployment strategies.
//!
//! The crate covers the closed-form objective ([`model`]), its box-constrained
//! maximization and validation oracles ([`solver`]), weight and parameter
//! sensitivity ([`sensitivity`]), seeded synthetic datasets ([`datagen`],
//! [`table`]), a preprocessing pipeline ([`preprocess`]), tree-ensemble and
//! linear surrogates ([`surrogate`]), statistical tests ([`stats`]) and the
//! experiment reports built on top of them ([`experiments`], [`report`]).

pub mod datagen;
pub mod experiments;
pub mod model;
pub mod preprocess;
pub mod report;
pub mod seed;
pub mod sensitivity;
pub mod solver;
pub mod stats;
pub mod surrogate;
pub mod table;

pub use model::{
    component_scores, composite_objective, economic_resilience, environmental_cost,
    objective_gradient, sustainability_impact, BoundsSet, ComponentScores, DeploymentStrategy,
    Interval, LogBase, ModelCoefficients, ModelError, Variable, WeightConfig,
};
pub use solver::{
    corner_oracle, grid_oracle, maximize, OptimizationResult, SolverConfig, SolverError,
};
