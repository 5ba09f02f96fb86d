//! Binary PPM heatmaps with a perceptual color ramp.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::matrix::Matrix;

/// Viridis anchor colors, low to high.
const RAMP: [[u8; 3]; 9] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
];

/// Largest image side targeted by the automatic upscaling.
const TARGET_SIDE: usize = 512;

pub fn ramp_color(t: f64) -> [u8; 3] {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (RAMP.len() - 1) as f64;
    let k = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - k as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        let a = RAMP[k][c] as f64;
        let b = RAMP[k + 1][c] as f64;
        out[c] = (a + f * (b - a)).round() as u8;
    }
    out
}

/// Integer block size so the longer side approaches [`TARGET_SIDE`].
pub fn upscale_factor(rows: usize, cols: usize) -> usize {
    (TARGET_SIDE / rows.max(cols).max(1)).max(1)
}

/// Renders row 0 at the top; values map linearly from `[0, max]`.
pub fn encode_ppm(m: &Matrix, scale: usize) -> Vec<u8> {
    let scale = scale.max(1);
    let (rows, cols) = m.shape();
    let max = m.as_slice().iter().copied().fold(0.0, f64::max);
    let (w, h) = (cols * scale, rows * scale);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(3 * w * h);
    for i in 0..rows {
        let line: Vec<[u8; 3]> = (0..cols)
            .map(|j| {
                let v = m.get(i, j);
                ramp_color(if max > 0.0 { v.max(0.0) / max } else { 0.0 })
            })
            .collect();
        for _ in 0..scale {
            for px in &line {
                for _ in 0..scale {
                    out.extend_from_slice(px);
                }
            }
        }
    }
    out
}

/// Sidecar path holding axis labels for an image.
pub fn sidecar_path(image: &Path) -> PathBuf {
    let mut name = image.as_os_str().to_owned();
    name.push(".axes.txt");
    PathBuf::from(name)
}

pub fn axes_sidecar(row_axis: &[f64], col_axis: &[f64], scale: usize, max: f64) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(",");
    let mut s = String::new();
    writeln!(s, "rows (top to bottom): {}", join(row_axis)).unwrap();
    writeln!(s, "cols (left to right): {}", join(col_axis)).unwrap();
    writeln!(s, "pixels per cell: {scale}").unwrap();
    writeln!(s, "color scale: linear, 0 to {max:e}").unwrap();
    s
}

pub fn render_heatmap(
    m: &Matrix,
    row_axis: &[f64],
    col_axis: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let scale = upscale_factor(m.rows(), m.cols());
    std::fs::write(path, encode_ppm(m, scale))?;
    let max = m.as_slice().iter().copied().fold(0.0, f64::max);
    std::fs::write(sidecar_path(path), axes_sidecar(row_axis, col_axis, scale, max))?;
    Ok(())
}
