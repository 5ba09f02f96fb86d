use serde::{Deserialize, Serialize};

use super::grid::{validate_axis, wavelength_to_omega, FrequencyGrid};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::stats;

/// Sum tolerance for a spectrum flagged as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Non-negative intensity over a signal × idler wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    grid: FrequencyGrid,
    values: Matrix,
    normalized: bool,
}

impl JointSpectrum {
    /// Wraps raw non-negative values without normalizing them.
    pub fn new(grid: FrequencyGrid, values: Matrix) -> Result<Self> {
        if grid.shape() != values.shape() {
            return Err(Error::ShapeMismatch {
                expected: grid.shape(),
                found: values.shape(),
            });
        }
        if values.as_slice().iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "joint spectrum values must be finite and non-negative".into(),
            ));
        }
        let sum = values.sum();
        Ok(Self {
            grid,
            values,
            normalized: (sum - 1.0).abs() <= NORMALIZATION_TOLERANCE,
        })
    }

    /// Wraps and scales to unit sum.
    pub fn normalized(grid: FrequencyGrid, values: Matrix) -> Result<Self> {
        Self::new(grid, values)?.normalize()
    }

    pub fn normalize(self) -> Result<Self> {
        let sum = self.values.sum();
        if !(sum > 0.0) {
            return Err(Error::EmptySpectrum);
        }
        let values = self.values.map(|v| v / sum);
        Ok(Self {
            grid: self.grid,
            values,
            normalized: true,
        })
    }

    /// Transmission-style matrix that is never flagged as normalized.
    pub(crate) fn unnormalized(grid: FrequencyGrid, values: Matrix) -> Result<Self> {
        let mut s = Self::new(grid, values)?;
        s.normalized = false;
        Ok(s)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn into_values(self) -> Matrix {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn sum(&self) -> f64 {
        self.values.sum()
    }

    /// Fails unless the spectrum is flagged normalized and sums to one.
    pub fn require_normalized(&self) -> Result<()> {
        let sum = self.values.sum();
        if !self.normalized || (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Unnormalized { sum });
        }
        Ok(())
    }

    /// Pearson correlation of signal and idler wavelengths under this spectrum.
    pub fn pearson_wavelength(&self) -> f64 {
        stats::pearson_weighted(self.grid.signal_nm(), self.grid.idler_nm(), &self.values)
    }

    /// Pearson correlation of signal and idler angular frequencies.
    pub fn pearson_frequency(&self) -> f64 {
        stats::pearson_weighted(
            &self.grid.signal_omega(),
            &self.grid.idler_omega(),
            &self.values,
        )
    }

    pub fn transpose(&self) -> JointSpectrum {
        JointSpectrum {
            grid: self.grid.swapped(),
            values: self.values.transpose(),
            normalized: self.normalized,
        }
    }
}

/// One-dimensional spectral distribution over a wavelength axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMarginal {
    axis_nm: Vec<f64>,
    probabilities: Vec<f64>,
}

impl SpectralMarginal {
    pub fn new(axis_nm: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        validate_axis("marginal", &axis_nm)?;
        if axis_nm.len() != probabilities.len() {
            return Err(Error::ShapeMismatch {
                expected: (axis_nm.len(), 1),
                found: (probabilities.len(), 1),
            });
        }
        if probabilities.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "marginal probabilities must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            axis_nm,
            probabilities,
        })
    }

    /// Uniform distribution over the axis.
    pub fn uniform(axis_nm: Vec<f64>) -> Result<Self> {
        let n = axis_nm.len();
        Self::new(axis_nm, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn axis_nm(&self) -> &[f64] {
        &self.axis_nm
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.axis_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis_nm.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.sum() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    pub fn normalize(self) -> Result<Self> {
        let sum = self.sum();
        if !(sum > 0.0) {
            return Err(Error::EmptySpectrum);
        }
        Ok(Self {
            probabilities: self.probabilities.iter().map(|p| p / sum).collect(),
            axis_nm: self.axis_nm,
        })
    }

    pub fn mean_nm(&self) -> f64 {
        let sum = self.sum();
        self.axis_nm
            .iter()
            .zip(&self.probabilities)
            .map(|(l, p)| l * p)
            .sum::<f64>()
            / sum
    }

    /// Full width at half maximum by linear interpolation between bins.
    pub fn fwhm_nm(&self) -> f64 {
        stats::fwhm(&self.axis_nm, &self.probabilities)
    }

    pub fn omega(&self) -> Vec<f64> {
        self.axis_nm.iter().map(|&l| wavelength_to_omega(l)).collect()
    }
}
