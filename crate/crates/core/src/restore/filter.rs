use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::fft::{dft2, idft2};

/// Low-pass mask around the zero-frequency bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FourierMask {
    /// Disk radius in frequency bins; `None` means a twelfth of the smaller dimension.
    pub dc_radius: Option<f64>,
    /// Zero the two frequency axes outside the disk; when off they pass untouched.
    pub suppress_axis_lines: bool,
    /// Raised-cosine roll-off width beyond the radius, bins.
    pub taper: f64,
}

impl Default for FourierMask {
    fn default() -> Self {
        Self {
            dc_radius: None,
            suppress_axis_lines: true,
            taper: 1.0,
        }
    }
}

/// Divisor of the smaller dimension giving the default radius.
pub const DEFAULT_RADIUS_DIVISOR: f64 = 12.0;

impl FourierMask {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.dc_radius {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("DC radius {r} must be at least 1 bin")));
            }
        }
        if !(self.taper >= 0.0 && self.taper.is_finite()) {
            return Err(Error::InvalidParameter("taper width must be non-negative".into()));
        }
        Ok(())
    }

    pub fn radius_for(&self, rows: usize, cols: usize) -> f64 {
        self.dc_radius
            .unwrap_or_else(|| (rows.min(cols) as f64 / DEFAULT_RADIUS_DIVISOR).max(1.0))
    }

    /// Mask weights for a `rows × cols` spectrum in unshifted bin order.
    pub fn weights(&self, rows: usize, cols: usize) -> Matrix {
        let r0 = self.radius_for(rows, cols);
        let signed = |k: usize, n: usize| {
            if k <= n / 2 {
                k as f64
            } else {
                k as f64 - n as f64
            }
        };
        Matrix::from_fn(rows, cols, |u, v| {
            let (fu, fv) = (signed(u, rows), signed(v, cols));
            let d = fu.hypot(fv);
            if d <= r0 || ((u == 0 || v == 0) && !self.suppress_axis_lines) {
                1.0
            } else if d < r0 + self.taper {
                0.5 * (1.0 + (PI * (d - r0) / self.taper).cos())
            } else {
                0.0
            }
        })
    }
}

/// Masked inverse transform before clamping and renormalization.
pub fn fourier_filter_unclamped(raw: &Matrix, mask: &FourierMask) -> Result<Matrix> {
    mask.validate()?;
    if raw.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let (rows, cols) = raw.shape();
    let weights = mask.weights(rows, cols);
    let mut spec = dft2(raw);
    for (z, &w) in spec.data.iter_mut().zip(weights.as_slice()) {
        *z *= w;
    }
    Ok(idft2(&spec))
}

/// Keeps the tapered DC disk, clamps negatives and renormalizes to sum 1.
pub fn fourier_filter(raw: &Matrix, mask: &FourierMask) -> Result<Matrix> {
    if raw.as_slice().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("input matrix has negative entries".into()));
    }
    let out = fourier_filter_unclamped(raw, mask)?.map(|v| v.max(0.0));
    if !(out.sum() > 0.0) {
        return Err(Error::EmptyResult("filtered matrix is identically zero".into()));
    }
    out.normalized()
}
