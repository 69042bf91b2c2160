use ecoopt_core::surrogate::{
    fit_boosting, fit_forest, fit_tree, BoostingParams, ForestParams, RegressionMetrics, TreeNode,
    TreeParams,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic(n: usize, d: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: DMatrix<f64> = DMatrix::from_fn(n, d, |_, _| rng.random_range(-1.0..1.0));
    let y = (0..n)
        .map(|i| x[(i, 0)].powi(2) + 0.5 * x[(i, 1 % d)] + 0.05 * rng.random_range(-1.0..1.0))
        .collect();
    (x, y)
}

fn row(x: &DMatrix<f64>, i: usize) -> Vec<f64> {
    x.row(i).iter().copied().collect()
}

fn mse(y: &[f64], p: &[f64]) -> f64 {
    y.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

#[test]
fn step_function_example() {
    let x = DMatrix::from_column_slice(4, 1, &[0.0, 1.0, 2.0, 3.0]);
    let params = TreeParams { max_depth: 1, min_samples_leaf: 1, feature_subset: None };
    let t = fit_tree(&x, &[0.0, 0.0, 10.0, 10.0], params, 0).unwrap();
    match t {
        TreeNode::Split { feature, threshold, left, right } => {
            assert_eq!((feature, threshold), (0, 1.5));
            assert_eq!(*left, TreeNode::Leaf { value: 0.0 });
            assert_eq!(*right, TreeNode::Leaf { value: 10.0 });
        }
        leaf => panic!("expected a split, got {leaf:?}"),
    }
}

#[test]
fn ensembles_decompose_into_trees() {
    let (x, y) = synthetic(200, 3, 1);
    let f = fit_forest(&x, &y, ForestParams { n_trees: 20, ..ForestParams::default() }, 5).unwrap();
    let b = fit_boosting(&x, &y, BoostingParams { n_trees: 30, ..BoostingParams::default() }, 5).unwrap();
    for i in 0..x.nrows() {
        let r = row(&x, i);
        let mean = f.trees.iter().map(|t| t.predict(&r)).sum::<f64>() / f.trees.len() as f64;
        assert!((f.predict(&r) - mean).abs() < 1e-12);
        let staged = b.base_prediction + b.learning_rate * b.trees.iter().map(|t| t.predict(&r)).sum::<f64>();
        assert!((b.predict(&r) - staged).abs() < 1e-12);
    }
    for imp in [&f.feature_importance, &b.feature_importance] {
        assert!(imp.iter().all(|&v| v >= 0.0));
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn boosting_training_error_never_increases() {
    let (x, y) = synthetic(200, 2, 9);
    let b = fit_boosting(&x, &y, BoostingParams::default(), 2).unwrap();
    let errors: Vec<f64> = b.staged_predict(&x).iter().map(|p| mse(&y, p)).collect();
    assert!(mse(&y, &vec![b.base_prediction; y.len()]) >= errors[0]);
    assert!(errors.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn signal_feature_dominates_importance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x: DMatrix<f64> = DMatrix::from_fn(200, 2, |_, _| rng.random_range(0.0..1.0));
    let y: Vec<f64> = (0..200).map(|i| x[(i, 0)]).collect();
    let f = fit_forest(&x, &y, ForestParams::default(), 3).unwrap();
    assert!(f.feature_importance[0] > 0.9, "{:?}", f.feature_importance);
}

#[test]
fn forest_is_seed_deterministic() {
    let (x, y) = synthetic(120, 4, 3);
    let p = ForestParams { n_trees: 15, ..ForestParams::default() };
    assert_eq!(fit_forest(&x, &y, p, 8).unwrap(), fit_forest(&x, &y, p, 8).unwrap());
    assert_ne!(fit_forest(&x, &y, p, 8).unwrap(), fit_forest(&x, &y, p, 9).unwrap());
}

#[test]
fn ensemble_json_round_trip() {
    let (x, y) = synthetic(60, 2, 4);
    let b = fit_boosting(&x, &y, BoostingParams { n_trees: 5, ..BoostingParams::default() }, 1).unwrap();
    let json = serde_json::to_string(&b).unwrap();
    assert!(json.contains("\"type\":\"split\""));
    assert_eq!(serde_json::from_str::<ecoopt_core::surrogate::TreeEnsemble>(&json).unwrap(), b);
}

/// Best depth-1 split by brute force: every midpoint of consecutive distinct
/// values, first strict improvement wins.
fn exhaustive_split(x: &[f64], y: &[f64], min_leaf: usize) -> Option<f64> {
    let sse = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|a| (a - m).powi(2)).sum::<f64>()
    };
    let mut distinct: Vec<f64> = x.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let total = sse(y);
    let mut best: Option<(f64, f64)> = None;
    for w in distinct.windows(2) {
        let t = 0.5 * (w[0] + w[1]);
        let l: Vec<f64> = (0..x.len()).filter(|&i| x[i] <= t).map(|i| y[i]).collect();
        let r: Vec<f64> = (0..x.len()).filter(|&i| x[i] > t).map(|i| y[i]).collect();
        if l.len() < min_leaf || r.len() < min_leaf {
            continue;
        }
        let gain = total - sse(&l) - sse(&r);
        if gain > 1e-12 * total.max(1.0) && best.is_none_or(|(g, _)| gain > g + 1e-9) {
            best = Some((gain, t));
        }
    }
    best.map(|(_, t)| t)
}

proptest! {
    #[test]
    fn depth_one_split_matches_enumeration(
        pts in prop::collection::vec((0u8..6, -10i8..10), 2..=8),
    ) {
        let xs: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1 as f64).collect();
        let x = DMatrix::from_column_slice(xs.len(), 1, &xs);
        let params = TreeParams { max_depth: 1, min_samples_leaf: 1, feature_subset: None };
        let t = fit_tree(&x, &ys, params, 0).unwrap();
        let got = match t {
            TreeNode::Split { threshold, .. } => Some(threshold),
            TreeNode::Leaf { .. } => None,
        };
        prop_assert_eq!(got, exhaustive_split(&xs, &ys, 1));
    }

    #[test]
    fn tree_ignores_row_order(seed in any::<u64>(), shift in 1usize..50) {
        let (x, y) = synthetic(50, 3, seed);
        let perm: Vec<usize> = (0..50).map(|i| (i + shift) % 50).collect();
        let xp = DMatrix::from_fn(50, 3, |i, j| x[(perm[i], j)]);
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let params = TreeParams { max_depth: 4, min_samples_leaf: 2, feature_subset: None };
        let a = fit_tree(&x, &y, params, 1).unwrap();
        let b = fit_tree(&xp, &yp, params, 1).unwrap();
        for i in 0..50 {
            let r = row(&x, i);
            prop_assert_eq!(a.predict(&r), b.predict(&r));
        }
    }

    #[test]
    fn metrics_invariants(y in prop::collection::vec(-100.0..100.0f64, 2..40), noise in -5.0..5.0f64) {
        let p: Vec<f64> = y.iter().enumerate().map(|(i, v)| v + noise * (i as f64).sin()).collect();
        let m = RegressionMetrics::compute(&y, &p);
        prop_assert!(m.mse >= 0.0 && m.mae >= 0.0);
        prop_assert!((m.rmse - m.mse.sqrt()).abs() < 1e-12);
        prop_assert!(m.r2 <= 1.0 || m.r2.is_nan());
    }
}
