use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DispersionAxis, PixelBox, RegionLabel};
use crate::sim::RegionMap;

/// Where photons of one kind land on the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub label: RegionLabel,
    #[serde(rename = "box")]
    pub bbox: PixelBox,
    #[serde(default)]
    pub axis: DispersionAxis,
}

/// Fixed-width bins along a region's dispersion axis, edge-aligned at the
/// start of the box; leftover pixels at the far end belong to no segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segmentation {
    pub region: RegionSpec,
    pub width_px: usize,
    pub count: usize,
    pub centers_nm: Vec<f64>,
}

impl Segmentation {
    /// Segment holding a continuous coordinate along the dispersion axis.
    pub fn segment_of(&self, along: f64) -> Option<usize> {
        let (start, _) = self.region.bbox.span(self.region.axis);
        let offset = along - (start as f64 - 0.5);
        if offset < 0.0 {
            return None;
        }
        let k = (offset / self.width_px as f64).floor() as usize;
        (k < self.count).then_some(k)
    }

    /// Wavelength pitch between adjacent segment centers.
    pub fn pitch_nm(&self) -> f64 {
        if self.centers_nm.len() < 2 {
            return 0.0;
        }
        (self.centers_nm[1] - self.centers_nm[0]).abs()
    }

    pub fn validate(&self) -> Result<()> {
        self.region.bbox.validate()?;
        let (a, b) = self.region.bbox.span(self.region.axis);
        if self.width_px == 0 || self.count < 2 || self.count * self.width_px > b - a {
            return Err(Error::Calibration(format!(
                "{} segmentation of {} x {} px does not fit its box",
                self.region.label, self.count, self.width_px
            )));
        }
        if self.centers_nm.len() != self.count {
            return Err(Error::Calibration(format!(
                "{} segmentation lists {} centers for {} segments",
                self.region.label,
                self.centers_nm.len(),
                self.count
            )));
        }
        Ok(())
    }
}

/// Splits a region into `width_px`-wide segments whose centers are mapped to
/// wavelength through `map`.
pub fn segment(region: &RegionSpec, map: &RegionMap, width_px: usize) -> Result<Segmentation> {
    if width_px == 0 {
        return Err(Error::InvalidParameter("segment width must be at least 1 px".into()));
    }
    let (a, b) = region.bbox.span(region.axis);
    let count = (b - a) / width_px;
    if count < 2 {
        return Err(Error::Calibration(format!(
            "{} region is {} px wide, too narrow for two {width_px}-px segments",
            region.label,
            b - a
        )));
    }
    let centers_nm = (0..count)
        .map(|k| {
            let center = a as f64 + (k * width_px) as f64 + (width_px as f64 - 1.0) / 2.0;
            map.pixel_to_wavelength(center)
        })
        .collect();
    Ok(Segmentation {
        region: *region,
        width_px,
        count,
        centers_nm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SpatialMap;

    fn region(x0: usize, x1: usize) -> RegionSpec {
        RegionSpec {
            label: RegionLabel::Signal,
            bbox: PixelBox { x0, y0: 0, x1, y1: 10 },
            axis: DispersionAxis::X,
        }
    }

    #[test]
    fn default_boxes_give_24_and_37_segments() {
        let map = SpatialMap::default();
        let s = segment(&region(80, 320), &map.signal, 10).unwrap();
        let i = segment(&region(15, 385), &map.idler, 10).unwrap();
        assert_eq!((s.count, i.count), (24, 37));
        assert!((s.pitch_nm() - 0.74).abs() < 1e-12);
        // Centered on the reference wavelength.
        assert!((s.centers_nm[11] + s.centers_nm[12] - 2.0 * 780.0).abs() < 1e-9);
        assert!((i.centers_nm[18] - 780.0).abs() < 1e-9);
    }

    #[test]
    fn half_width_segments() {
        let map = SpatialMap::default();
        let s = segment(&region(80, 320), &map.signal, 5).unwrap();
        assert_eq!(s.count, 48);
        assert!((s.pitch_nm() - 0.37).abs() < 1e-12);
    }

    #[test]
    fn remainder_is_dropped() {
        let map = SpatialMap::default();
        let s = segment(&region(100, 125), &map.signal, 10).unwrap();
        assert_eq!(s.count, 2);
        assert_eq!(s.segment_of(99.5), Some(0));
        assert_eq!(s.segment_of(109.49), Some(0));
        assert_eq!(s.segment_of(109.5), Some(1));
        assert_eq!(s.segment_of(119.4), Some(1));
        assert_eq!(s.segment_of(119.5), None);
        assert_eq!(s.segment_of(99.4), None);
    }

    #[test]
    fn too_narrow() {
        let map = SpatialMap::default();
        assert!(segment(&region(100, 109), &map.signal, 10).is_err());
        assert!(segment(&region(100, 115), &map.signal, 10).is_err());
        assert!(segment(&region(100, 200), &map.signal, 0).is_err());
    }
}
