use crate::error::{Error, Result};
use crate::geometry::{DispersionAxis, PixelBox, RegionLabel};
use crate::matrix::Matrix;

use super::accumulate::AccumulatedImage;
use super::segment::RegionSpec;

/// Rows (or columns) whose profile exceeds this fraction of the peak belong to a band.
const BAND_LEVEL: f64 = 0.01;
/// Bands separated by at most this many quiet lines are merged.
const BAND_GAP: usize = 2;
/// Mass trimmed from each tail before boxing.
const TAIL_QUANTILE: f64 = 0.0025;
/// Pixels added around the trimmed extent.
const BOX_MARGIN: usize = 2;

/// Finds the two bright bands of an accumulated image and boxes them.
///
/// Bands are stacked across `axis`; the first along the cross direction
/// (the upper band for horizontal dispersion) is the signal region.
pub fn calibrate_regions(
    acc: &AccumulatedImage,
    axis: DispersionAxis,
) -> Result<(RegionSpec, RegionSpec)> {
    if acc.frames == 0 {
        return Err(Error::Calibration("no frames accumulated".into()));
    }
    let excess = excess_image(&acc.mean());
    let cross = profile(&excess, axis, true);
    let peak = cross.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Calibration(
            "found 0 bands: accumulated image has no structure above background".into(),
        ));
    }
    let bands = find_bands(&cross, peak * BAND_LEVEL);
    if bands.len() != 2 {
        let list: Vec<String> = bands.iter().map(|(a, b)| format!("{a}..{b}")).collect();
        return Err(Error::Calibration(format!(
            "expected 2 bands, found {} at lines [{}]",
            bands.len(),
            list.join(", ")
        )));
    }
    let mut boxes = [
        band_box(&excess, axis, bands[0]),
        band_box(&excess, axis, bands[1]),
    ];
    separate(&mut boxes, axis, bands[0].1, bands[1].0);
    Ok((
        RegionSpec {
            label: RegionLabel::Signal,
            bbox: boxes[0],
            axis,
        },
        RegionSpec {
            label: RegionLabel::Idler,
            bbox: boxes[1],
            axis,
        },
    ))
}

/// Fraction of the above-background mass of `acc` that lies inside `boxes`.
pub fn covered_fraction(acc: &AccumulatedImage, boxes: &[PixelBox]) -> f64 {
    let excess = excess_image(&acc.mean());
    let total = excess.sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut inside = 0.0;
    for y in 0..excess.rows() {
        for x in 0..excess.cols() {
            if boxes.iter().any(|b| b.contains_pixel(x, y)) {
                inside += excess.get(y, x);
            }
        }
    }
    inside / total
}

/// Mean image minus its median, keeping only pixels clearly above the noise.
fn excess_image(mean: &Matrix) -> Matrix {
    let mut v = mean.as_slice().to_vec();
    let median = median_in_place(&mut v);
    for x in v.iter_mut() {
        *x = (*x - median).abs();
    }
    let sigma = 1.4826 * median_in_place(&mut v);
    let floor = 5.0 * sigma;
    mean.map(|m| {
        let d = m - median;
        if d > floor && d > 0.0 {
            d
        } else {
            0.0
        }
    })
}

fn median_in_place(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Sum over lines. `across = true` yields one entry per cross-axis line.
fn profile(m: &Matrix, axis: DispersionAxis, across: bool) -> Vec<f64> {
    let by_row = matches!((axis, across), (DispersionAxis::X, true) | (DispersionAxis::Y, false));
    if by_row {
        m.row_sums()
    } else {
        m.col_sums()
    }
}

fn find_bands(profile: &[f64], level: f64) -> Vec<(usize, usize)> {
    let mut bands: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < profile.len() {
        if profile[i] > level {
            let start = i;
            while i < profile.len() && profile[i] > level {
                i += 1;
            }
            match bands.last_mut() {
                Some(last) if start - last.1 <= BAND_GAP => last.1 = i,
                _ => bands.push((start, i)),
            }
        } else {
            i += 1;
        }
    }
    bands
}

fn band_box(excess: &Matrix, axis: DispersionAxis, band: (usize, usize)) -> PixelBox {
    let (lo, hi) = band;
    let (rows, cols) = excess.shape();
    // Restrict to the band's lines, then trim tails in both directions.
    let masked = Matrix::from_fn(rows, cols, |r, c| {
        let line = match axis {
            DispersionAxis::X => r,
            DispersionAxis::Y => c,
        };
        if line >= lo && line < hi {
            excess.get(r, c)
        } else {
            0.0
        }
    });
    let (y0, y1) = trimmed_extent(&masked.row_sums());
    let (x0, x1) = trimmed_extent(&masked.col_sums());
    PixelBox {
        x0: x0.saturating_sub(BOX_MARGIN),
        y0: y0.saturating_sub(BOX_MARGIN),
        x1: (x1 + BOX_MARGIN).min(cols),
        y1: (y1 + BOX_MARGIN).min(rows),
    }
}

/// Index range `[a, b)` holding all but `TAIL_QUANTILE` of the mass at each end.
fn trimmed_extent(p: &[f64]) -> (usize, usize) {
    let total: f64 = p.iter().sum();
    let mut acc = 0.0;
    let mut a = 0;
    for (i, v) in p.iter().enumerate() {
        acc += v;
        if acc > TAIL_QUANTILE * total {
            a = i;
            break;
        }
    }
    acc = 0.0;
    let mut b = p.len();
    for (i, v) in p.iter().enumerate().rev() {
        acc += v;
        if acc > TAIL_QUANTILE * total {
            b = i + 1;
            break;
        }
    }
    (a, b.max(a + 1))
}

/// Clips margins so the two boxes do not overlap across the axis.
fn separate(boxes: &mut [PixelBox; 2], axis: DispersionAxis, end_first: usize, start_second: usize) {
    if !boxes[0].intersects(&boxes[1]) {
        return;
    }
    let split = (end_first + start_second).div_ceil(2);
    match axis {
        DispersionAxis::X => {
            boxes[0].y1 = boxes[0].y1.min(split);
            boxes[1].y0 = boxes[1].y0.max(split);
        }
        DispersionAxis::Y => {
            boxes[0].x1 = boxes[0].x1.min(split);
            boxes[1].x0 = boxes[1].x0.max(split);
        }
    }
}
