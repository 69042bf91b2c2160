//! Random forests and least-squares gradient boosting.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, validate, Rows, TreeNode, TreeParams};
use super::SurrogateError;
use crate::seed::derive_seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Forest,
    Boosting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsemble {
    pub kind: EnsembleKind,
    pub trees: Vec<TreeNode>,
    pub learning_rate: f64,
    pub base_prediction: f64,
    pub feature_importance: Vec<f64>,
    pub seed: u64,
}

impl TreeEnsemble {
    pub fn predict(&self, row: &[f64]) -> f64 {
        match self.kind {
            EnsembleKind::Forest => {
                self.trees.iter().map(|t| t.predict(row)).sum::<f64>() / self.trees.len() as f64
            }
            EnsembleKind::Boosting => {
                self.base_prediction
                    + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
            }
        }
    }

    pub fn predict_matrix(&self, x: &DMatrix<f64>) -> Vec<f64> {
        let rows = Rows::new(x);
        (0..x.nrows()).map(|i| self.predict(rows.row(i))).collect()
    }

    /// Boosting predictions after each of the first `1..=trees` stages.
    pub fn staged_predict(&self, x: &DMatrix<f64>) -> Vec<Vec<f64>> {
        let rows = Rows::new(x);
        let mut current = vec![self.base_prediction; x.nrows()];
        self.trees
            .iter()
            .map(|t| {
                for (i, c) in current.iter_mut().enumerate() {
                    *c += self.learning_rate * t.predict(rows.row(i));
                }
                current.clone()
            })
            .collect()
    }
}

fn normalize(gains: Vec<f64>) -> Vec<f64> {
    let total: f64 = gains.iter().sum();
    if total > 0.0 {
        gains.into_iter().map(|g| g / total).collect()
    } else {
        gains.into_iter().map(|_| 0.0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features drawn per split; `None` means `ceil(d / 3)`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 10,
            min_samples_leaf: 2,
            max_features: None,
        }
    }
}

/// Bootstrap-aggregated trees, each split drawing `ceil(d / 3)` features
/// unless `max_features` says otherwise. Trees are grown in parallel from
/// per-tree seeds, so results do not depend on the thread count.
pub fn fit_forest(
    x: &DMatrix<f64>,
    y: &[f64],
    params: ForestParams,
    seed: u64,
) -> Result<TreeEnsemble, SurrogateError> {
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        feature_subset: Some(params.max_features.unwrap_or(x.ncols().div_ceil(3).max(1))),
    };
    validate(x, y, &tree_params)?;
    if params.n_trees == 0 {
        return Err(SurrogateError::InvalidParameter("n_trees must be at least 1".into()));
    }
    let rows = Rows::new(x);
    let n = y.len();
    let grown: Vec<(TreeNode, Vec<f64>)> = derive_seeds(seed, params.n_trees)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            grow_tree(&rows, y, idx, tree_params, rng.random())
        })
        .collect();
    let mut gains = vec![0.0; x.ncols()];
    let mut trees = Vec::with_capacity(grown.len());
    for (t, g) in grown {
        for (a, b) in gains.iter_mut().zip(g) {
            *a += b;
        }
        trees.push(t);
    }
    Ok(TreeEnsemble {
        kind: EnsembleKind::Forest,
        trees,
        learning_rate: 1.0,
        base_prediction: 0.0,
        feature_importance: normalize(gains),
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoostingParams {
    pub n_trees: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
}

impl Default for BoostingParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            learning_rate: 0.1,
            max_depth: 6,
            min_samples_leaf: 5,
        }
    }
}

/// Stagewise least-squares boosting from the target mean.
pub fn fit_boosting(
    x: &DMatrix<f64>,
    y: &[f64],
    params: BoostingParams,
    seed: u64,
) -> Result<TreeEnsemble, SurrogateError> {
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        feature_subset: None,
    };
    validate(x, y, &tree_params)?;
    if !(params.learning_rate >= 0.0 && params.learning_rate <= 1.0) {
        return Err(SurrogateError::InvalidParameter(format!(
            "learning_rate must lie in [0, 1], got {}",
            params.learning_rate
        )));
    }
    let rows = Rows::new(x);
    let n = y.len();
    let base = crate::stats::mean(y);
    let mut pred = vec![base; n];
    let mut gains = vec![0.0; x.ncols()];
    let mut trees = Vec::with_capacity(params.n_trees);
    for s in derive_seeds(seed, params.n_trees) {
        let residual: Vec<f64> = y.iter().zip(&pred).map(|(t, p)| t - p).collect();
        let (tree, g) = grow_tree(&rows, &residual, (0..n).collect(), tree_params, s);
        for (a, b) in gains.iter_mut().zip(g) {
            *a += b;
        }
        for (i, p) in pred.iter_mut().enumerate() {
            *p += params.learning_rate * tree.predict(rows.row(i));
        }
        trees.push(tree);
    }
    Ok(TreeEnsemble {
        kind: EnsembleKind::Boosting,
        trees,
        learning_rate: params.learning_rate,
        base_prediction: base,
        feature_importance: normalize(gains),
        seed,
    })
}
