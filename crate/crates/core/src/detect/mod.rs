//! Frame accumulation, region calibration, segmentation and photon detection.

mod accumulate;
mod calibrate;
mod calibration;
mod hits;
mod segment;

pub use accumulate::{accumulate, AccumulatedImage};
pub use calibrate::{calibrate_regions, covered_fraction};
pub use calibration::Calibration;
pub use hits::{
    background_stats, detect_hits, BackgroundStat, Connectivity, DetectionParams, Detector,
    PhotonHit,
};
pub use segment::{segment, RegionSpec, Segmentation};
