use std::io::Write;

use rayon::prelude::*;

use super::frame::Frame;
use super::simulator::FrameSimulator;
use crate::error::Result;
use crate::io::FrameStreamWriter;

/// Frames generated concurrently per batch before being written in order.
const BATCH: u64 = 64;

/// Generates frames `0..n_frames` in parallel batches and writes them in
/// index order. Output depends only on the simulator and `master_seed`.
pub fn simulate_stream<W: Write>(
    sim: &FrameSimulator,
    n_frames: u64,
    master_seed: u64,
    writer: &mut FrameStreamWriter<W>,
    mut progress: impl FnMut(u64),
) -> Result<()> {
    let mut start = 0;
    while start < n_frames {
        let end = (start + BATCH).min(n_frames);
        let frames: Vec<Frame> = (start..end)
            .into_par_iter()
            .map(|k| sim.frame(master_seed, k))
            .collect();
        for frame in &frames {
            writer.write_frame(frame)?;
        }
        progress(end);
        start = end;
    }
    Ok(())
}

/// Iterator over frames `range` of a simulated stream, generated lazily.
pub fn simulated_frames(
    sim: &FrameSimulator,
    master_seed: u64,
    range: std::ops::Range<u64>,
) -> impl Iterator<Item = Frame> + '_ {
    range.map(move |k| sim.frame(master_seed, k))
}
