use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which photon of the pair a detector region holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionLabel {
    Signal,
    Idler,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionLabel::Signal => "signal",
            RegionLabel::Idler => "idler",
        })
    }
}

/// Image axis along which wavelength varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersionAxis {
    #[default]
    X,
    Y,
}

/// Pixel rectangle `[x0, x1) × [y0, y1)`.
///
/// Continuous coordinates put pixel centers on integers, so the box spans
/// `[x0 − ½, x1 − ½) × [y0 − ½, y1 − ½)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PixelBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PixelBox {
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Result<Self> {
        let b = Self { x0, y0, x1, y1 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(Error::InvalidParameter(format!("empty pixel box {self:?}")));
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }

    pub fn contains_pixel(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x0 as f64 - 0.5
            && x < self.x1 as f64 - 0.5
            && y >= self.y0 as f64 - 0.5
            && y < self.y1 as f64 - 0.5
    }

    pub fn intersects(&self, other: &PixelBox) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    pub fn fits_within(&self, width: usize, height: usize) -> bool {
        self.x1 <= width && self.y1 <= height
    }

    /// Pixel index range `[start, end)` along an axis.
    pub fn span(&self, axis: DispersionAxis) -> (usize, usize) {
        match axis {
            DispersionAxis::X => (self.x0, self.x1),
            DispersionAxis::Y => (self.y0, self.y1),
        }
    }

    /// Pixel index range across an axis.
    pub fn cross_span(&self, axis: DispersionAxis) -> (usize, usize) {
        match axis {
            DispersionAxis::X => (self.y0, self.y1),
            DispersionAxis::Y => (self.x0, self.x1),
        }
    }
}

/// Coordinate of `(x, y)` along `axis`.
#[inline]
pub fn along(axis: DispersionAxis, x: f64, y: f64) -> f64 {
    match axis {
        DispersionAxis::X => x,
        DispersionAxis::Y => y,
    }
}
