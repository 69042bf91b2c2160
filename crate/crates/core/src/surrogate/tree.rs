//! CART regression trees with variance-reduction splits.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SurrogateError;

const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        value: f64,
    },
}

impl TreeNode {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if row[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    /// Features drawn per split; `None` considers all of them.
    pub feature_subset: Option<usize>,
}

pub(crate) fn check_xy(x: &DMatrix<f64>, y: &[f64]) -> Result<(), SurrogateError> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(SurrogateError::Empty);
    }
    if x.nrows() != y.len() {
        return Err(SurrogateError::DimensionMismatch {
            rows: x.nrows(),
            targets: y.len(),
        });
    }
    if !x.iter().chain(y).all(|v| v.is_finite()) {
        return Err(SurrogateError::NonFinite);
    }
    Ok(())
}

fn check_params(p: &TreeParams, d: usize) -> Result<(), SurrogateError> {
    if p.min_samples_leaf == 0 {
        return Err(SurrogateError::InvalidParameter(
            "min_samples_leaf must be at least 1".into(),
        ));
    }
    if let Some(m) = p.feature_subset {
        if m == 0 || m > d {
            return Err(SurrogateError::InvalidParameter(format!(
                "feature_subset must lie in 1..={d}, got {m}"
            )));
        }
    }
    Ok(())
}

/// Row-major copy for cache-friendly access during growth.
pub(crate) struct Rows {
    data: Vec<f64>,
    d: usize,
}

impl Rows {
    pub(crate) fn new(x: &DMatrix<f64>) -> Self {
        let d = x.ncols();
        let mut data = Vec::with_capacity(x.len());
        for i in 0..x.nrows() {
            data.extend(x.row(i).iter());
        }
        Self { data, d }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

struct Grower<'a> {
    x: &'a Rows,
    y: &'a [f64],
    params: TreeParams,
    rng: ChaCha8Rng,
    gains: Vec<f64>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Grower<'_> {
    fn leaf(&self, idx: &[usize]) -> TreeNode {
        // Summing in sorted order keeps leaf values independent of row order.
        let mut v: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
        v.sort_by(f64::total_cmp);
        TreeNode::Leaf {
            value: v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> TreeNode {
        let n = idx.len();
        let leaf_min = self.params.min_samples_leaf;
        if depth >= self.params.max_depth || n < 2 * leaf_min {
            return self.leaf(&idx);
        }
        let first = self.y[idx[0]];
        if idx.iter().all(|&i| self.y[i] == first) {
            return self.leaf(&idx);
        }
        match self.best_split(&idx) {
            Some(s) => {
                self.gains[s.feature] += s.gain;
                let left = self.grow(s.left, depth + 1);
                let right = self.grow(s.right, depth + 1);
                TreeNode::Split {
                    feature: s.feature,
                    threshold: s.threshold,
                    left: Box::new(left),
                    right: Box::new(right),
                }
            }
            None => self.leaf(&idx),
        }
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.d;
        match self.params.feature_subset {
            Some(m) if m < d => {
                let mut f = sample(&mut self.rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let n = idx.len();
        let leaf_min = self.params.min_samples_leaf;
        let features = self.candidate_features();
        // (feature, threshold, gain)
        let mut best: Option<(usize, f64, f64)> = None;
        let total = {
            let mut v: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
            v.sort_by(f64::total_cmp);
            v.iter().sum::<f64>()
        };
        let base = total * total / n as f64;
        let sse: f64 = {
            let m = total / n as f64;
            idx.iter().map(|&i| (self.y[i] - m).powi(2)).sum()
        };
        // Gains that agree to within rounding count as ties, which keep the
        // earlier (lower feature, lower threshold) candidate.
        let tie = TIE_TOLERANCE * sse;
        let mut sorted = idx.to_vec();
        for &f in &features {
            sorted.sort_by(|&a, &b| {
                self.x
                    .get(a, f)
                    .total_cmp(&self.x.get(b, f))
                    .then(self.y[a].total_cmp(&self.y[b]))
            });
            let mut left_sum = 0.0;
            for p in 1..n {
                left_sum += self.y[sorted[p - 1]];
                if p < leaf_min || n - p < leaf_min {
                    continue;
                }
                let (a, b) = (self.x.get(sorted[p - 1], f), self.x.get(sorted[p], f));
                if a >= b {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / p as f64
                    + right_sum * right_sum / (n - p) as f64
                    - base;
                if best.as_ref().is_none_or(|bst| gain > bst.2 + tie) {
                    let mut threshold = 0.5 * (a + b);
                    if threshold >= b {
                        threshold = a;
                    }
                    best = Some((f, threshold, gain));
                }
            }
        }
        let (feature, threshold, gain) = best?;
        if gain <= 1e-12 * sse {
            return None;
        }
        let (left, right) = idx
            .iter()
            .copied()
            .partition(|&i| self.x.get(i, feature) <= threshold);
        Some(BestSplit {
            feature,
            threshold,
            gain,
            left,
            right,
        })
    }
}

/// Grows a tree on the rows listed in `idx` (duplicates allowed). Returns
/// the tree and the per-feature sum of SSE reductions.
pub(crate) fn grow_tree(
    x: &Rows,
    y: &[f64],
    idx: Vec<usize>,
    params: TreeParams,
    seed: u64,
) -> (TreeNode, Vec<f64>) {
    let mut g = Grower {
        x,
        y,
        params,
        rng: ChaCha8Rng::seed_from_u64(seed),
        gains: vec![0.0; x.d],
    };
    let root = g.grow(idx, 0);
    (root, g.gains)
}

pub(crate) fn validate(x: &DMatrix<f64>, y: &[f64], params: &TreeParams) -> Result<(), SurrogateError> {
    check_xy(x, y)?;
    check_params(params, x.ncols())
}

/// Fits a single regression tree. The seed only drives feature
/// subsampling.
pub fn fit_tree(
    x: &DMatrix<f64>,
    y: &[f64],
    params: TreeParams,
    seed: u64,
) -> Result<TreeNode, SurrogateError> {
    validate(x, y, &params)?;
    let rows = Rows::new(x);
    Ok(grow_tree(&rows, y, (0..y.len()).collect(), params, seed).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(depth: usize, leaf: usize) -> TreeParams {
        TreeParams {
            max_depth: depth,
            min_samples_leaf: leaf,
            feature_subset: None,
        }
    }

    fn column(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn step_function_split() {
        let t = fit_tree(&column(&[0.0, 1.0, 2.0, 3.0]), &[0.0, 0.0, 10.0, 10.0], params(1, 1), 0)
            .unwrap();
        match t {
            TreeNode::Split {
                feature,
                threshold,
                ref left,
                ref right,
            } => {
                assert_eq!((feature, threshold), (0, 1.5));
                assert_eq!(**left, TreeNode::Leaf { value: 0.0 });
                assert_eq!(**right, TreeNode::Leaf { value: 10.0 });
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn constant_target_and_depth_zero() {
        let x = column(&[0.0, 1.0, 2.0]);
        assert_eq!(
            fit_tree(&x, &[4.0, 4.0, 4.0], params(5, 1), 0).unwrap(),
            TreeNode::Leaf { value: 4.0 }
        );
        assert_eq!(
            fit_tree(&x, &[1.0, 2.0, 6.0], params(0, 1), 0).unwrap(),
            TreeNode::Leaf { value: 3.0 }
        );
    }

    #[test]
    fn min_samples_leaf_respected() {
        let x = column(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = [0.0, 9.0, 9.0, 9.0, 9.0, 9.0];
        let t = fit_tree(&x, &y, params(1, 2), 0).unwrap();
        let TreeNode::Split { threshold, .. } = t else {
            panic!()
        };
        assert_eq!(threshold, 1.5);
    }

    #[test]
    fn errors() {
        let x = column(&[0.0, 1.0]);
        assert!(matches!(
            fit_tree(&x, &[1.0], params(1, 1), 0),
            Err(SurrogateError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            fit_tree(&DMatrix::zeros(0, 1), &[], params(1, 1), 0),
            Err(SurrogateError::Empty)
        ));
        assert!(fit_tree(&x, &[1.0, 2.0], params(1, 0), 0).is_err());
    }
}
