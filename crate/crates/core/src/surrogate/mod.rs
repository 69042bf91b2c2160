//! Regression models used as surrogates of the objective components:
//! OLS, CART trees, random forests and gradient boosting.

use thiserror::Error;

pub mod cv;
pub mod ensemble;
pub mod linear;
pub mod metrics;
pub mod tree;

pub use cv::{cross_validate, fold_indices, CvResult, FittedModel, ModelSpec};
pub use ensemble::{
    fit_boosting, fit_forest, BoostingParams, EnsembleKind, ForestParams, TreeEnsemble,
};
pub use linear::{fit_linear, LinearModel};
pub use metrics::RegressionMetrics;
pub use tree::{fit_tree, TreeNode, TreeParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurrogateError {
    #[error("no training data")]
    Empty,
    #[error("feature matrix has {rows} rows but there are {targets} targets")]
    DimensionMismatch { rows: usize, targets: usize },
    #[error("training data contains non-finite values")]
    NonFinite,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("design matrix is rank deficient")]
    SingularDesign,
    #[error("need more rows ({rows}) than features ({features})")]
    TooFewRows { rows: usize, features: usize },
    #[error("cannot split {n} rows into {k} folds")]
    Folds { k: usize, n: usize },
}
