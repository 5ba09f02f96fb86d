use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Speed of light in mm/s, the unit system used by wavenumbers (rad/mm).
pub const SPEED_OF_LIGHT_MM: f64 = SPEED_OF_LIGHT * 1e3;

/// Angular frequency (rad/s) of a vacuum wavelength given in nm.
#[inline]
pub fn wavelength_to_omega(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Vacuum wavelength (nm) of an angular frequency given in rad/s.
#[inline]
pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Width in rad/s of a small wavelength interval around `center_nm`.
#[inline]
pub fn bandwidth_nm_to_omega(center_nm: f64, width_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * (width_nm * 1e-9) / (center_nm * 1e-9).powi(2)
}

/// Signal and idler wavelength axes. Rows of every joint spectrum follow the
/// signal axis, columns the idler axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    signal_nm: Vec<f64>,
    idler_nm: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(signal_nm: Vec<f64>, idler_nm: Vec<f64>) -> Result<Self> {
        validate_axis("signal", &signal_nm)?;
        validate_axis("idler", &idler_nm)?;
        Ok(Self {
            signal_nm,
            idler_nm,
        })
    }

    /// Evenly spaced axes centred on the given wavelengths.
    pub fn uniform(
        signal_center_nm: f64,
        signal_step_nm: f64,
        signal_bins: usize,
        idler_center_nm: f64,
        idler_step_nm: f64,
        idler_bins: usize,
    ) -> Result<Self> {
        Self::new(
            centered_axis(signal_center_nm, signal_step_nm, signal_bins),
            centered_axis(idler_center_nm, idler_step_nm, idler_bins),
        )
    }

    pub fn signal_nm(&self) -> &[f64] {
        &self.signal_nm
    }

    pub fn idler_nm(&self) -> &[f64] {
        &self.idler_nm
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.signal_nm.len(), self.idler_nm.len())
    }

    pub fn signal_omega(&self) -> Vec<f64> {
        self.signal_nm.iter().map(|&l| wavelength_to_omega(l)).collect()
    }

    pub fn idler_omega(&self) -> Vec<f64> {
        self.idler_nm.iter().map(|&l| wavelength_to_omega(l)).collect()
    }

    /// Same axes with signal and idler exchanged.
    pub fn swapped(&self) -> FrequencyGrid {
        FrequencyGrid {
            signal_nm: self.idler_nm.clone(),
            idler_nm: self.signal_nm.clone(),
        }
    }
}

pub(crate) fn centered_axis(center: f64, step: f64, bins: usize) -> Vec<f64> {
    let mid = (bins as f64 - 1.0) / 2.0;
    (0..bins).map(|k| center + (k as f64 - mid) * step).collect()
}

pub(crate) fn validate_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} axis is empty")));
    }
    if axis.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{name} axis wavelengths must be finite and positive"
        )));
    }
    if axis.len() > 1 {
        let increasing = axis.windows(2).all(|w| w[1] > w[0]);
        let decreasing = axis.windows(2).all(|w| w[1] < w[0]);
        if !increasing && !decreasing {
            return Err(Error::InvalidParameter(format!(
                "{name} axis is not strictly monotonic"
            )));
        }
    }
    Ok(())
}

/// Half-open extents `[lo, hi)` of the cell around each axis point: midpoints
/// between neighbours, half a step past each end.
pub(crate) fn cell_edges(axis: &[f64]) -> Vec<(f64, f64)> {
    let n = axis.len();
    if n == 1 {
        return vec![(axis[0], axis[0])];
    }
    (0..n)
        .map(|k| {
            let lo = if k == 0 {
                axis[0] - (axis[1] - axis[0]) / 2.0
            } else {
                (axis[k - 1] + axis[k]) / 2.0
            };
            let hi = if k == n - 1 {
                axis[n - 1] + (axis[n - 1] - axis[n - 2]) / 2.0
            } else {
                (axis[k] + axis[k + 1]) / 2.0
            };
            (lo, hi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_roundtrip() {
        for l in [390.0, 779.5, 780.0, 1550.0] {
            let back = omega_to_wavelength(wavelength_to_omega(l));
            assert!((back - l).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_pair_sums_to_pump() {
        let sum = 2.0 * wavelength_to_omega(780.0);
        assert!((sum - wavelength_to_omega(390.0)).abs() / sum < 1e-15);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(FrequencyGrid::new(vec![], vec![780.0]).is_err());
        assert!(FrequencyGrid::new(vec![780.0, 780.0], vec![780.0]).is_err());
        assert!(FrequencyGrid::new(vec![780.0, 781.0, 780.5], vec![780.0]).is_err());
        assert!(FrequencyGrid::new(vec![-1.0], vec![780.0]).is_err());
        assert!(FrequencyGrid::new(vec![781.0, 780.0], vec![780.0]).is_ok());
    }

    #[test]
    fn axes_may_differ_in_length() {
        let g = FrequencyGrid::uniform(780.0, 0.74, 24, 780.0, 0.74, 37).unwrap();
        assert_eq!(g.shape(), (24, 37));
        assert!((g.signal_nm()[0] - (780.0 - 11.5 * 0.74)).abs() < 1e-12);
        assert!((g.idler_nm()[18] - 780.0).abs() < 1e-12);
    }

    #[test]
    fn cell_edges_tile_the_axis() {
        let edges = cell_edges(&[1.0, 2.0, 4.0]);
        assert_eq!(edges, vec![(0.5, 1.5), (1.5, 3.0), (3.0, 5.0)]);
    }
}
