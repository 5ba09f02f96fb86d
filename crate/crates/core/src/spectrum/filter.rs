use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterShape {
    Gaussian,
    /// exp(−ln2·(2|Δλ|/FWHM)^(2·order)); order 1 is the Gaussian.
    SuperGaussian { order: u32 },
}

/// Band-pass intensity transmission of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    #[serde(default = "default_peak")]
    pub peak: f64,
    #[serde(default = "default_shape")]
    pub shape: FilterShape,
}

fn default_peak() -> f64 {
    1.0
}

fn default_shape() -> FilterShape {
    FilterShape::Gaussian
}

impl FilterSpec {
    pub fn gaussian(center_nm: f64, fwhm_nm: f64) -> Self {
        Self {
            center_nm,
            fwhm_nm,
            peak: 1.0,
            shape: FilterShape::Gaussian,
        }
    }

    /// Transmits everything.
    pub fn unit() -> Self {
        Self::gaussian(780.0, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peak > 0.0 && self.peak <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "filter peak transmission {} outside (0, 1]",
                self.peak
            )));
        }
        if !(self.fwhm_nm > 0.0) {
            return Err(Error::InvalidParameter("filter FWHM must be positive".into()));
        }
        if !self.center_nm.is_finite() || self.center_nm <= 0.0 {
            return Err(Error::InvalidParameter("filter center must be positive".into()));
        }
        if let FilterShape::SuperGaussian { order } = self.shape {
            if order == 0 {
                return Err(Error::InvalidParameter(
                    "super-Gaussian order must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn transmission(&self, wavelength_nm: f64) -> f64 {
        let order = match self.shape {
            FilterShape::Gaussian => 1,
            FilterShape::SuperGaussian { order } => order,
        };
        let u = 2.0 * (wavelength_nm - self.center_nm).abs() / self.fwhm_nm;
        self.peak * (-std::f64::consts::LN_2 * u.powi(2 * order as i32)).exp()
    }
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self::gaussian(779.5, 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_transmission_at_half_width() {
        let f = FilterSpec::gaussian(779.5, 3.0);
        assert!((f.transmission(779.5) - 1.0).abs() < 1e-15);
        assert!((f.transmission(781.0) - 0.5).abs() < 1e-12);
        assert!((f.transmission(778.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn super_gaussian_is_flatter() {
        let g = FilterSpec::gaussian(780.0, 3.0);
        let sg = FilterSpec {
            shape: FilterShape::SuperGaussian { order: 3 },
            ..g
        };
        assert!((sg.transmission(781.5) - 0.5).abs() < 1e-12);
        assert!(sg.transmission(780.8) > g.transmission(780.8));
        assert!(sg.transmission(783.0) < g.transmission(783.0));
    }

    #[test]
    fn unit_filter_passes_everything() {
        let f = FilterSpec::unit();
        f.validate().unwrap();
        assert_eq!(f.transmission(700.0), 1.0);
    }

    #[test]
    fn validation() {
        let mut f = FilterSpec { peak: 0.0, ..Default::default() };
        assert!(f.validate().is_err());
        f.peak = 1.2;
        assert!(f.validate().is_err());
        f.peak = 0.9;
        f.fwhm_nm = 0.0;
        assert!(f.validate().is_err());
    }
}
