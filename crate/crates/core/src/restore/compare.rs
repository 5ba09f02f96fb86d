use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Agreement between two normalized matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub bhattacharyya: f64,
    pub pearson: f64,
    pub rmse: f64,
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        format!(
            "bhattacharyya={:.6}\npearson={:.6}\nrmse={:.6e}\n",
            self.bhattacharyya, self.pearson, self.rmse
        )
    }
}

/// Overlap `Σ √(a·b)` of two normalized matrices, clamped to `[0, 1]`.
pub fn bhattacharyya(a: &Matrix, b: &Matrix) -> f64 {
    let s: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x * y).sqrt())
        .sum();
    s.clamp(0.0, 1.0)
}

pub fn compare(a: &Matrix, b: &Matrix) -> Result<ComparisonReport> {
    a.ensure_same_shape(b)?;
    if a.as_slice().iter().chain(b.as_slice()).any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter("compared matrices must be finite and non-negative".into()));
    }
    let (a, b) = (a.normalized()?, b.normalized()?);
    let (x, y) = (a.as_slice(), b.as_slice());
    let n = x.len() as f64;
    let rmse = (x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>() / n).sqrt();
    let pearson = if x == y {
        1.0
    } else {
        crate::stats::pearson(x, y).clamp(-1.0, 1.0)
    };
    Ok(ComparisonReport {
        bhattacharyya: bhattacharyya(&a, &b),
        pearson,
        rmse,
    })
}
