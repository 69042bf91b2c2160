//! Regression metrics.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub r2: f64,
    pub mse: f64,
    pub mae: f64,
    pub rmse: f64,
}

impl RegressionMetrics {
    /// R² uses the mean of `y_true` in its denominator. A constant target
    /// scores 1 when predicted exactly and 0 otherwise.
    pub fn compute(y_true: &[f64], y_pred: &[f64]) -> Self {
        assert_eq!(y_true.len(), y_pred.len(), "metric inputs differ in length");
        assert!(!y_true.is_empty(), "metrics need at least one observation");
        let n = y_true.len() as f64;
        let mean = y_true.iter().sum::<f64>() / n;
        let (mut ss_res, mut ss_tot, mut abs) = (0.0, 0.0, 0.0);
        for (t, p) in y_true.iter().zip(y_pred) {
            let e = t - p;
            ss_res += e * e;
            abs += e.abs();
            ss_tot += (t - mean) * (t - mean);
        }
        let r2 = if ss_tot > 0.0 {
            1.0 - ss_res / ss_tot
        } else if ss_res == 0.0 {
            1.0
        } else {
            0.0
        };
        let mse = ss_res / n;
        Self {
            r2,
            mse,
            mae: abs / n,
            rmse: mse.sqrt(),
        }
    }

    fn map(list: &[Self], f: impl Fn(&[f64]) -> f64) -> Self {
        let pick = |g: fn(&Self) -> f64| f(&list.iter().map(g).collect::<Vec<_>>());
        Self {
            r2: pick(|m| m.r2),
            mse: pick(|m| m.mse),
            mae: pick(|m| m.mae),
            rmse: pick(|m| m.rmse),
        }
    }

    pub fn mean_of(list: &[Self]) -> Self {
        Self::map(list, crate::stats::mean)
    }

    /// Sample standard deviation per field; zero for fewer than two entries.
    pub fn std_of(list: &[Self]) -> Self {
        Self::map(list, |v| {
            if v.len() < 2 {
                0.0
            } else {
                crate::stats::sample_std(v)
            }
        })
    }
}
