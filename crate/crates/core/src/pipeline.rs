//! Parallel drivers that shard frames across threads and merge the results.

use std::ops::Range;

use rayon::prelude::*;

use crate::correlate::CorrelationAccumulator;
use crate::detect::{AccumulatedImage, Calibration, DetectionParams, Detector};
use crate::error::{Error, Result};
use crate::sim::{Frame, FrameSimulator};

/// Frames pulled from a sequential source before a parallel pass.
pub const CHUNK: usize = 512;

fn correlate_chunk(
    frames: &[Frame],
    calibration: &Calibration,
    params: &DetectionParams,
) -> Result<CorrelationAccumulator> {
    frames
        .par_iter()
        .try_fold(
            || (Detector::new(calibration, *params), CorrelationAccumulator::for_calibration(calibration), Vec::new()),
            |(mut det, mut acc, mut hits), frame| {
                check_dims(frame, calibration)?;
                hits.clear();
                det.detect_into(frame, &mut hits);
                acc.record_frame(&hits)?;
                Ok((det, acc, hits))
            },
        )
        .map(|r| r.map(|(_, acc, _)| acc))
        .try_reduce(
            || CorrelationAccumulator::for_calibration(calibration),
            |a, b| a.merge(&b),
        )
}

fn check_dims(frame: &Frame, cal: &Calibration) -> Result<()> {
    if (frame.width, frame.height) != (cal.sensor_width, cal.sensor_height) {
        return Err(Error::ShapeMismatch {
            expected: (cal.sensor_height, cal.sensor_width),
            found: (frame.height, frame.width),
        });
    }
    Ok(())
}

/// Detects and counts coincidences over a frame source. `progress` receives
/// the number of frames processed so far after each chunk.
pub fn correlate_frames<I>(
    frames: I,
    calibration: &Calibration,
    params: &DetectionParams,
    mut progress: impl FnMut(u64),
) -> Result<CorrelationAccumulator>
where
    I: IntoIterator<Item = Result<Frame>>,
{
    params.validate()?;
    let mut total = CorrelationAccumulator::for_calibration(calibration);
    let mut iter = frames.into_iter();
    let mut chunk = Vec::with_capacity(CHUNK);
    loop {
        chunk.clear();
        for f in iter.by_ref().take(CHUNK) {
            chunk.push(f?);
        }
        if chunk.is_empty() {
            break;
        }
        total = total.merge(&correlate_chunk(&chunk, calibration, params)?)?;
        progress(total.frames);
    }
    Ok(total)
}

/// Sums a frame source.
pub fn accumulate_frames<I>(frames: I, mut progress: impl FnMut(u64)) -> Result<AccumulatedImage>
where
    I: IntoIterator<Item = Result<Frame>>,
{
    let mut iter = frames.into_iter();
    let mut total: Option<AccumulatedImage> = None;
    let mut chunk = Vec::with_capacity(CHUNK);
    loop {
        chunk.clear();
        for f in iter.by_ref().take(CHUNK) {
            chunk.push(f?);
        }
        let Some(first) = chunk.first() else { break };
        let (w, h) = (first.width, first.height);
        let part = chunk
            .par_iter()
            .try_fold(
                || AccumulatedImage::new(w, h),
                |mut acc, f| acc.add(f).map(|_| acc),
            )
            .try_reduce(|| AccumulatedImage::new(w, h), |a, b| a.merge(&b))?;
        total = Some(match total {
            Some(t) => t.merge(&part)?,
            None => part,
        });
        progress(total.as_ref().map_or(0, |t| t.frames));
    }
    total.ok_or_else(|| Error::InvalidParameter("cannot accumulate an empty stream".into()))
}

/// Simulates frames `range` and counts coincidences without storing them.
pub fn correlate_simulated(
    sim: &FrameSimulator,
    master_seed: u64,
    range: Range<u64>,
    calibration: &Calibration,
    params: &DetectionParams,
) -> Result<CorrelationAccumulator> {
    params.validate()?;
    range
        .into_par_iter()
        .try_fold(
            || (Detector::new(calibration, *params), CorrelationAccumulator::for_calibration(calibration), Vec::new()),
            |(mut det, mut acc, mut hits), k| {
                let frame = sim.frame(master_seed, k);
                check_dims(&frame, calibration)?;
                hits.clear();
                det.detect_into(&frame, &mut hits);
                acc.record_frame(&hits)?;
                Ok((det, acc, hits))
            },
        )
        .map(|r| r.map(|(_, acc, _)| acc))
        .try_reduce(
            || CorrelationAccumulator::for_calibration(calibration),
            |a, b| a.merge(&b),
        )
}

/// Simulates frames `range` and sums them.
pub fn accumulate_simulated(sim: &FrameSimulator, master_seed: u64, range: Range<u64>) -> Result<AccumulatedImage> {
    let (w, h) = (sim.camera().width, sim.camera().height);
    range
        .into_par_iter()
        .try_fold(
            || AccumulatedImage::new(w, h),
            |mut acc, k| acc.add(&sim.frame(master_seed, k)).map(|_| acc),
        )
        .try_reduce(|| AccumulatedImage::new(w, h), |a, b| a.merge(&b))
}
