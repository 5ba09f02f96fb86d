//! On-disk formats: frame streams, matrices, configuration and images.

mod frames;
mod heatmap;
mod matrix;

pub use frames::{
    decode_frame_stream, encode_frame_stream, FrameStreamHeader, FrameStreamReader,
    FrameStreamWriter, FRAME_HEADER_LEN, FRAME_MAGIC, FRAME_FORMAT_VERSION,
};
pub use heatmap::{axes_sidecar, encode_ppm, ramp_color, render_heatmap, sidecar_path, upscale_factor};
pub use matrix::{MatrixFile, MATRIX_MAGIC, MATRIX_FORMAT_VERSION};

mod config;

pub use config::{
    DispersionConfig, FiltersConfig, NoiseConfig, RunConfig, SegmentationConfig, SpectrumKind,
};
