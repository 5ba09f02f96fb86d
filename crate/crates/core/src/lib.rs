//! Spectral correlation imaging of photon pairs from gated camera frames.
//!
//! The crate models the joint spectral intensity of down-converted photon
//! pairs ([`spectrum`]), synthesizes camera frames ([`sim`]), detects photons
//! ([`detect`]), counts coincidences ([`correlate`]), and restores
//! segment-discretized matrices in the Fourier domain ([`restore`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlate;
pub mod detect;
pub mod error;
pub mod geometry;
pub mod io;
pub mod matrix;
pub mod pipeline;
pub mod restore;
pub mod sim;
pub mod spectrum;
pub mod stats;

pub use correlate::{CorrelationAccumulator, CorrelationMatrix, RateReport};
pub use detect::{Calibration, DetectionParams, PhotonHit, Segmentation};
pub use error::{Error, Result};
pub use geometry::{DispersionAxis, PixelBox, RegionLabel};
pub use matrix::Matrix;
pub use restore::{ComparisonReport, FourierMask};
pub use sim::{CameraConfig, Frame, FrameSimulator, GateMode, SourceConfig, SpatialMap};
pub use spectrum::{FrequencyGrid, JointSpectrum, SpectralMarginal};
