//! Ordinary least squares via QR on standardized columns.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::tree::check_xy;
use super::SurrogateError;

const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept + self.coefficients.iter().zip(row).map(|(c, x)| c * x).sum::<f64>()
    }

    pub fn predict_matrix(&self, x: &DMatrix<f64>) -> Vec<f64> {
        x.row_iter()
            .map(|r| self.intercept + r.iter().zip(&self.coefficients).map(|(x, c)| x * c).sum::<f64>())
            .collect()
    }
}

/// Least squares with an intercept. Columns are centred and scaled before
/// the QR factorization; a column that is constant or a linear combination
/// of others yields [`SurrogateError::SingularDesign`].
pub fn fit_linear(x: &DMatrix<f64>, y: &[f64]) -> Result<LinearModel, SurrogateError> {
    check_xy(x, y)?;
    let (n, d) = x.shape();
    if n <= d {
        return Err(SurrogateError::TooFewRows { rows: n, features: d });
    }
    let means: Vec<f64> = x.column_iter().map(|c| c.mean()).collect();
    let scales: Vec<f64> = x
        .column_iter()
        .zip(&means)
        .map(|(c, m)| (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64).sqrt())
        .collect();
    if scales.contains(&0.0) {
        return Err(SurrogateError::SingularDesign);
    }
    let z = DMatrix::from_fn(n, d, |i, j| (x[(i, j)] - means[j]) / scales[j]);
    let y_mean = crate::stats::mean(y);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));

    let qr = z.qr();
    let r = qr.r();
    let max_diag = r.diagonal().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if r.diagonal().iter().any(|v| v.abs() <= RANK_TOLERANCE * max_diag * n as f64) {
        return Err(SurrogateError::SingularDesign);
    }
    let qty = qr.q().transpose() * yc;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(SurrogateError::SingularDesign)?;

    let coefficients: Vec<f64> = beta.iter().zip(&scales).map(|(b, s)| b / s).collect();
    let intercept = y_mean - coefficients.iter().zip(&means).map(|(c, m)| c * m).sum::<f64>();
    Ok(LinearModel {
        coefficients,
        intercept,
    })
}
