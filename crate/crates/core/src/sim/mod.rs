//! Monte-Carlo synthesis of gated single-photon camera frames.

mod camera;
mod frame;
mod map;
mod render;
mod sampler;
mod simulator;
mod stream;

pub use camera::{
    CameraConfig, GateMode, SourceConfig, DEFAULT_LONG_GATE_S, DEFAULT_PULSE_INTERVAL_S,
    DEFAULT_SHORT_GATE_S,
};
pub use frame::Frame;
pub use map::{RegionMap, SpatialMap, DEFAULT_SLOPE_NM_PER_PX};
pub use render::{render_hit, ReadoutNoise};
pub use sampler::{sample_pair, PairSampler};
pub use simulator::{FrameSimulator, SimulatedFrame, TruePhoton};
pub use stream::{simulate_stream, simulated_frames};
