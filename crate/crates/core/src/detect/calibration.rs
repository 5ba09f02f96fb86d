use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RegionLabel;
use crate::sim::SpatialMap;
use crate::matrix::Matrix;
use crate::spectrum::{FrequencyGrid, JointSpectrum};

use super::segment::{segment, RegionSpec, Segmentation};

/// Everything a correlation run needs to turn positions into spectral bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub sensor_width: usize,
    pub sensor_height: usize,
    pub map: SpatialMap,
    pub signal: Segmentation,
    pub idler: Segmentation,
}

impl Calibration {
    /// Uses the boxes configured in `map` directly.
    pub fn from_map(map: &SpatialMap, width_px: usize, sensor_width: usize, sensor_height: usize) -> Result<Self> {
        let regions = (
            RegionSpec {
                label: RegionLabel::Signal,
                bbox: map.signal.bbox,
                axis: map.signal.axis,
            },
            RegionSpec {
                label: RegionLabel::Idler,
                bbox: map.idler.bbox,
                axis: map.idler.axis,
            },
        );
        Self::from_regions(map, regions, width_px, sensor_width, sensor_height)
    }

    pub fn from_regions(
        map: &SpatialMap,
        regions: (RegionSpec, RegionSpec),
        width_px: usize,
        sensor_width: usize,
        sensor_height: usize,
    ) -> Result<Self> {
        let cal = Self {
            sensor_width,
            sensor_height,
            map: *map,
            signal: segment(&regions.0, &map.signal, width_px)?,
            idler: segment(&regions.1, &map.idler, width_px)?,
        };
        cal.validate()?;
        Ok(cal)
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        self.idler.validate()?;
        if self.signal.region.label != RegionLabel::Signal || self.idler.region.label != RegionLabel::Idler {
            return Err(Error::Calibration("region labels are swapped".into()));
        }
        for s in [&self.signal, &self.idler] {
            if !s.region.bbox.fits_within(self.sensor_width, self.sensor_height) {
                return Err(Error::Calibration(format!(
                    "{} box {:?} exceeds the {}x{} sensor",
                    s.region.label, s.region.bbox, self.sensor_width, self.sensor_height
                )));
            }
        }
        if self.signal.region.bbox.intersects(&self.idler.region.bbox) {
            return Err(Error::Calibration("signal and idler boxes overlap".into()));
        }
        Ok(())
    }

    pub fn segmentation(&self, label: RegionLabel) -> &Segmentation {
        match label {
            RegionLabel::Signal => &self.signal,
            RegionLabel::Idler => &self.idler,
        }
    }

    /// Correlation matrix shape `(signal segments, idler segments)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.signal.count, self.idler.count)
    }

    /// Segment-center wavelength grid of the correlation matrix.
    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(self.signal.centers_nm.clone(), self.idler.centers_nm.clone())
    }

    /// Sums a spectrum given on `map.pixel_grid()` into segment cells.
    ///
    /// Pixels falling in no segment are dropped; the result is renormalized.
    pub fn bin_spectrum(&self, pixel_spectrum: &JointSpectrum) -> Result<JointSpectrum> {
        let expected = (
            self.map.signal.pixel_wavelengths().len(),
            self.map.idler.pixel_wavelengths().len(),
        );
        if pixel_spectrum.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: pixel_spectrum.shape(),
            });
        }
        let bins = |seg: &Segmentation, region: &crate::sim::RegionMap| -> Vec<Option<usize>> {
            let (a, b) = region.bbox.span(region.axis);
            (a..b).map(|p| seg.segment_of(p as f64)).collect()
        };
        let rows = bins(&self.signal, &self.map.signal);
        let cols = bins(&self.idler, &self.map.idler);
        let mut out = Matrix::zeros(self.signal.count, self.idler.count);
        for (r, sr) in rows.iter().enumerate() {
            let Some(sr) = sr else { continue };
            for (c, sc) in cols.iter().enumerate() {
                if let Some(sc) = sc {
                    let v = out.get(*sr, *sc) + pixel_spectrum.get(r, c);
                    out.set(*sr, *sc, v);
                }
            }
        }
        JointSpectrum::normalized(self.grid()?, out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cal: Self = toml::from_str(text).map_err(|e| Error::Format(format!("calibration: {e}")))?;
        cal.validate()?;
        Ok(cal)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::CalibrationMissing {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml(&text)
    }
}
