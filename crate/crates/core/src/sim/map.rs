use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DispersionAxis, PixelBox, RegionLabel};
use crate::spectrum::FrequencyGrid;

/// Affine wavelength ↔ pixel map of one photon region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionMap {
    #[serde(default)]
    pub axis: DispersionAxis,
    pub slope_nm_per_px: f64,
    pub ref_wavelength_nm: f64,
    /// Continuous coordinate along the axis at which `ref_wavelength_nm` lands.
    pub ref_pixel: f64,
    /// Continuous coordinate across the axis of the beam center.
    pub band_center: f64,
    #[serde(rename = "box")]
    pub bbox: PixelBox,
}

impl RegionMap {
    pub fn validate(&self) -> Result<()> {
        if self.slope_nm_per_px == 0.0 || !self.slope_nm_per_px.is_finite() {
            return Err(Error::InvalidParameter("map slope must be finite and non-zero".into()));
        }
        if !(self.ref_wavelength_nm > 0.0) || !self.ref_pixel.is_finite() {
            return Err(Error::InvalidParameter("map reference point is invalid".into()));
        }
        self.bbox.validate()?;
        let (c0, c1) = self.bbox.cross_span(self.axis);
        if !(self.band_center >= c0 as f64 - 0.5 && self.band_center < c1 as f64 - 0.5) {
            return Err(Error::InvalidParameter(format!(
                "band center {} lies outside the region box",
                self.band_center
            )));
        }
        let (lo, hi) = self.wavelength_range();
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::InvalidParameter("mapped wavelengths must be positive".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn pixel_to_wavelength(&self, pixel: f64) -> f64 {
        self.ref_wavelength_nm + self.slope_nm_per_px * (pixel - self.ref_pixel)
    }

    #[inline]
    pub fn wavelength_to_pixel(&self, wavelength_nm: f64) -> f64 {
        self.ref_pixel + (wavelength_nm - self.ref_wavelength_nm) / self.slope_nm_per_px
    }

    /// Continuous extent `[start, end)` of the box along the dispersion axis.
    pub fn pixel_extent(&self) -> (f64, f64) {
        let (a, b) = self.bbox.span(self.axis);
        (a as f64 - 0.5, b as f64 - 0.5)
    }

    /// Wavelength interval covered by the box, ordered low to high.
    pub fn wavelength_range(&self) -> (f64, f64) {
        let (a, b) = self.pixel_extent();
        let (la, lb) = (self.pixel_to_wavelength(a), self.pixel_to_wavelength(b));
        (la.min(lb), la.max(lb))
    }

    /// Image coordinates `(x, y)` of a wavelength on the beam center line.
    pub fn freq_to_pixel(&self, wavelength_nm: f64) -> Result<(f64, f64)> {
        let p = self.wavelength_to_pixel(wavelength_nm);
        let (a, b) = self.pixel_extent();
        if !(p >= a && p < b) {
            let (min_nm, max_nm) = self.wavelength_range();
            return Err(Error::OutOfRange {
                wavelength_nm,
                min_nm,
                max_nm,
            });
        }
        Ok(match self.axis {
            DispersionAxis::X => (p, self.band_center),
            DispersionAxis::Y => (self.band_center, p),
        })
    }

    /// Wavelength at each pixel center of the box along the axis.
    pub fn pixel_wavelengths(&self) -> Vec<f64> {
        let (a, b) = self.bbox.span(self.axis);
        (a..b).map(|p| self.pixel_to_wavelength(p as f64)).collect()
    }
}

/// Calibrated map of both photon regions onto the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialMap {
    pub signal: RegionMap,
    pub idler: RegionMap,
}

/// Spectral resolution per pixel used by the default map.
pub const DEFAULT_SLOPE_NM_PER_PX: f64 = 0.074;

impl SpatialMap {
    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        self.idler.validate()?;
        if self.signal.bbox.intersects(&self.idler.bbox) {
            return Err(Error::InvalidParameter(
                "signal and idler boxes overlap".into(),
            ));
        }
        Ok(())
    }

    pub fn region(&self, label: RegionLabel) -> &RegionMap {
        match label {
            RegionLabel::Signal => &self.signal,
            RegionLabel::Idler => &self.idler,
        }
    }

    /// One grid point per pixel along each region's dispersion axis.
    pub fn pixel_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.signal.pixel_wavelengths(), self.idler.pixel_wavelengths())
    }
}

impl Default for SpatialMap {
    /// 400 × 96 sensor: signal band on row 24 over 240 px, idler band on row
    /// 72 over 370 px, both centered on 780 nm at x = 199.5.
    fn default() -> Self {
        Self {
            signal: RegionMap {
                axis: DispersionAxis::X,
                slope_nm_per_px: DEFAULT_SLOPE_NM_PER_PX,
                ref_wavelength_nm: 780.0,
                ref_pixel: 199.5,
                band_center: 24.0,
                bbox: PixelBox {
                    x0: 80,
                    y0: 12,
                    x1: 320,
                    y1: 37,
                },
            },
            idler: RegionMap {
                axis: DispersionAxis::X,
                slope_nm_per_px: DEFAULT_SLOPE_NM_PER_PX,
                ref_wavelength_nm: 780.0,
                ref_pixel: 199.5,
                band_center: 72.0,
                bbox: PixelBox {
                    x0: 15,
                    y0: 60,
                    x1: 385,
                    y1: 85,
                },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_per_step() {
        let m = SpatialMap::default().signal;
        let d10 = m.pixel_to_wavelength(110.0) - m.pixel_to_wavelength(100.0);
        let d5 = m.pixel_to_wavelength(105.0) - m.pixel_to_wavelength(100.0);
        assert!((d10 - 0.74).abs() < 1e-12);
        assert!((d5 - 0.37).abs() < 1e-12);
    }

    #[test]
    fn roundtrip_and_range() {
        let map = SpatialMap::default();
        map.validate().unwrap();
        for l in [772.0, 779.5, 780.0, 788.0] {
            let (x, y) = map.signal.freq_to_pixel(l).unwrap();
            assert_eq!(y, 24.0);
            assert!((map.signal.pixel_to_wavelength(x) - l).abs() < 1e-9);
        }
        assert!(matches!(
            map.signal.freq_to_pixel(790.0),
            Err(Error::OutOfRange { .. })
        ));
        let (lo, hi) = map.signal.wavelength_range();
        assert!((lo - (780.0 - 120.0 * 0.074)).abs() < 1e-9);
        assert!((hi - (780.0 + 120.0 * 0.074)).abs() < 1e-9);
    }

    #[test]
    fn vertical_axis_maps_to_rows() {
        let mut r = SpatialMap::default().signal;
        r.axis = DispersionAxis::Y;
        r.bbox = PixelBox { x0: 20, y0: 0, x1: 40, y1: 300 };
        r.band_center = 30.0;
        r.ref_pixel = 149.5;
        r.validate().unwrap();
        let (x, y) = r.freq_to_pixel(780.0).unwrap();
        assert_eq!((x, y), (30.0, 149.5));
    }

    #[test]
    fn overlapping_boxes_rejected() {
        let mut map = SpatialMap::default();
        map.idler.bbox = map.signal.bbox;
        map.idler.band_center = map.signal.band_center;
        assert!(map.validate().is_err());
        let mut map = SpatialMap::default();
        map.signal.slope_nm_per_px = 0.0;
        assert!(map.validate().is_err());
    }
}
