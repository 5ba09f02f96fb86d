use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty spectrum on grid")]
    EmptySpectrum,

    #[error("spectrum is not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("wavelength {wavelength_nm} nm outside mapped range [{min_nm}, {max_nm}] nm")]
    OutOfRange {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("dispersion evaluation failed: {0}")]
    Dispersion(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("calibration file {path} is missing or unreadable: {reason}")]
    CalibrationMissing { path: String, reason: String },

    #[error("segment index {index} out of range for {count} segments")]
    SegmentIndex { index: usize, count: usize },

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("bad magic bytes: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("truncated payload at frame {frame}")]
    Truncated { frame: u64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("frame {frame}: {source}")]
    FrameWrite {
        frame: u64,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Short machine-parseable category, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::EmptySpectrum => "empty-spectrum",
            Error::Unnormalized { .. } => "unnormalized",
            Error::ShapeMismatch { .. } => "shape-mismatch",
            Error::OutOfRange { .. } => "out-of-range",
            Error::Dispersion(_) => "dispersion",
            Error::Calibration(_) => "calibration",
            Error::CalibrationMissing { .. } => "calibration-missing",
            Error::SegmentIndex { .. } => "segment-index",
            Error::EmptyResult(_) => "empty-result",
            Error::BadMagic { .. } => "bad-magic",
            Error::VersionMismatch { .. } => "version-mismatch",
            Error::Truncated { .. } => "truncated",
            Error::Format(_) => "format",
            Error::Config(_) => "config",
            Error::FrameWrite { .. } => "frame-write",
            Error::Io(_) => "io",
        }
    }
}
