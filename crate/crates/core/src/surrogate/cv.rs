//! Seeded k-fold cross-validation.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ensemble::{fit_boosting, fit_forest, BoostingParams, ForestParams, TreeEnsemble};
use super::linear::{fit_linear, LinearModel};
use super::metrics::RegressionMetrics;
use super::tree::{check_xy, fit_tree, TreeNode, TreeParams};
use super::SurrogateError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Linear,
    Tree { params: TreeParams, seed: u64 },
    Forest { params: ForestParams, seed: u64 },
    Boosting { params: BoostingParams, seed: u64 },
}

impl ModelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::Linear => "Linear Regression",
            ModelSpec::Tree { .. } => "Regression Tree",
            ModelSpec::Forest { .. } => "Random Forest",
            ModelSpec::Boosting { .. } => "Gradient Boosting",
        }
    }

    pub fn fit(&self, x: &DMatrix<f64>, y: &[f64]) -> Result<FittedModel, SurrogateError> {
        Ok(match *self {
            ModelSpec::Linear => FittedModel::Linear(fit_linear(x, y)?),
            ModelSpec::Tree { params, seed } => FittedModel::Tree(fit_tree(x, y, params, seed)?),
            ModelSpec::Forest { params, seed } => {
                FittedModel::Ensemble(fit_forest(x, y, params, seed)?)
            }
            ModelSpec::Boosting { params, seed } => {
                FittedModel::Ensemble(fit_boosting(x, y, params, seed)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FittedModel {
    Linear(LinearModel),
    Tree(TreeNode),
    Ensemble(TreeEnsemble),
}

impl FittedModel {
    pub fn predict_matrix(&self, x: &DMatrix<f64>) -> Vec<f64> {
        match self {
            FittedModel::Linear(m) => m.predict_matrix(x),
            FittedModel::Tree(t) => x
                .row_iter()
                .map(|r| t.predict(&r.iter().copied().collect::<Vec<_>>()))
                .collect(),
            FittedModel::Ensemble(e) => e.predict_matrix(x),
        }
    }

    pub fn feature_importance(&self) -> Option<&[f64]> {
        match self {
            FittedModel::Ensemble(e) => Some(&e.feature_importance),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub folds: Vec<RegressionMetrics>,
    pub mean: RegressionMetrics,
    pub std: RegressionMetrics,
    /// Held-out prediction for every row, in input order.
    pub oof_predictions: Vec<f64>,
}

/// Shuffles `0..n` with `seed` and cuts it into `k` contiguous folds whose
/// sizes differ by at most one (larger folds first).
pub fn fold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, SurrogateError> {
    if k < 2 || k > n {
        return Err(SurrogateError::Folds { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

fn select_rows(x: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

pub fn cross_validate(
    spec: &ModelSpec,
    x: &DMatrix<f64>,
    y: &[f64],
    k: usize,
    seed: u64,
) -> Result<CvResult, SurrogateError> {
    check_xy(x, y)?;
    let folds = fold_indices(y.len(), k, seed)?;
    let mut oof = vec![0.0; y.len()];
    let mut metrics = Vec::with_capacity(k);
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        let y_train: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let y_test: Vec<f64> = test.iter().map(|&i| y[i]).collect();
        let model = spec.fit(&select_rows(x, &train), &y_train)?;
        let pred = model.predict_matrix(&select_rows(x, test));
        for (&i, &p) in test.iter().zip(&pred) {
            oof[i] = p;
        }
        metrics.push(RegressionMetrics::compute(&y_test, &pred));
    }
    Ok(CvResult {
        mean: RegressionMetrics::mean_of(&metrics),
        std: RegressionMetrics::std_of(&metrics),
        folds: metrics,
        oof_predictions: oof,
    })
}
