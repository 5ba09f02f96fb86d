use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

use super::frame::Frame;

/// Below this PSF sigma a spot collapses onto its nearest pixel.
const POINT_PSF_SIGMA: f64 = 1e-3;

/// Adds a pixel-integrated 2D Gaussian spot of `total_counts` centered at
/// `(x, y)`. Tails falling off the sensor are dropped.
pub fn render_hit(frame: &mut Frame, x: f64, y: f64, total_counts: f64, psf_sigma: f64) {
    if !(total_counts > 0.0) {
        return;
    }
    if psf_sigma < POINT_PSF_SIGMA {
        let (px, py) = (x.round(), y.round());
        if px >= 0.0 && py >= 0.0 && (px as usize) < frame.width && (py as usize) < frame.height {
            frame.add(px as usize, py as usize, total_counts.round() as u32);
        }
        return;
    }
    let reach = (5.0 * psf_sigma).ceil() + 1.0;
    let xs = pixel_weights(x, reach, psf_sigma, frame.width);
    let ys = pixel_weights(y, reach, psf_sigma, frame.height);
    for &(py, wy) in &ys {
        for &(px, wx) in &xs {
            let counts = (total_counts * wx * wy).round();
            if counts >= 1.0 {
                frame.add(px, py, counts as u32);
            }
        }
    }
}

/// Fraction of a unit 1D Gaussian falling in each pixel near `center`.
fn pixel_weights(center: f64, reach: f64, sigma: f64, len: usize) -> Vec<(usize, f64)> {
    let lo = (center - reach).floor().max(0.0) as i64;
    let hi = ((center + reach).ceil() as i64).min(len as i64 - 1);
    let scale = 1.0 / (std::f64::consts::SQRT_2 * sigma);
    (lo..=hi)
        .map(|p| {
            let a = erf((p as f64 - 0.5 - center) * scale);
            let b = erf((p as f64 + 0.5 - center) * scale);
            (p as usize, 0.5 * (b - a))
        })
        .collect()
}

/// Bias plus Gaussian readout noise, quantized to whole counts.
///
/// Noise is drawn by inverse-CDF lookup on 16-bit uniforms, four pixels per
/// 64-bit draw. Tails beyond ±4.3σ are not represented.
#[derive(Debug, Clone)]
pub struct ReadoutNoise {
    table: Option<Box<[i32]>>,
    bias: i32,
}

impl ReadoutNoise {
    pub fn new(sigma: f64, bias: f64) -> Self {
        let bias_counts = bias.round() as i32;
        if sigma <= 0.0 {
            return Self {
                table: None,
                bias: bias_counts,
            };
        }
        let normal = Normal::new(0.0, sigma).expect("positive sigma");
        let n = 1usize << 16;
        let table = (0..n)
            .map(|k| {
                let q = (k as f64 + 0.5) / n as f64;
                (bias + normal.inverse_cdf(q)).round() as i32
            })
            .collect();
        Self {
            table: Some(table),
            bias: bias_counts,
        }
    }

    pub fn apply<R: Rng + ?Sized>(&self, frame: &mut Frame, rng: &mut R) {
        #[inline]
        fn put(p: &mut u16, delta: i32) {
            *p = (*p as i32 + delta).clamp(0, u16::MAX as i32) as u16;
        }
        match &self.table {
            None => {
                if self.bias != 0 {
                    for p in &mut frame.pixels {
                        put(p, self.bias);
                    }
                }
            }
            Some(table) => {
                let mut chunks = frame.pixels.chunks_exact_mut(4);
                for chunk in &mut chunks {
                    let bits: u64 = rng.random();
                    put(&mut chunk[0], table[(bits & 0xffff) as usize]);
                    put(&mut chunk[1], table[((bits >> 16) & 0xffff) as usize]);
                    put(&mut chunk[2], table[((bits >> 32) & 0xffff) as usize]);
                    put(&mut chunk[3], table[(bits >> 48) as usize]);
                }
                for p in chunks.into_remainder() {
                    let bits: u16 = rng.random();
                    put(p, table[bits as usize]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::sim::GateMode;

    fn blank() -> Frame {
        Frame::new(0, 64, 64, GateMode::TimeDependent)
    }

    #[test]
    fn point_psf_puts_everything_in_one_pixel() {
        let mut f = blank();
        render_hit(&mut f, 10.2, 20.4, 400.0, 0.0);
        assert_eq!(f.get(10, 20), 400);
        assert_eq!(f.total(), 400);
    }

    #[test]
    fn spot_total_close_to_gain() {
        let mut f = blank();
        let (x, y, sigma) = (31.3, 30.8, 1.5);
        render_hit(&mut f, x, y, 400.0, sigma);
        let mut sum = 0u64;
        for py in 0..64usize {
            for px in 0..64usize {
                if (px as f64 - x).abs() <= 6.0 * sigma && (py as f64 - y).abs() <= 6.0 * sigma {
                    sum += f.get(px, py) as u64;
                }
            }
        }
        assert!((sum as f64 - 400.0).abs() / 400.0 < 0.02, "{sum}");
    }

    #[test]
    fn rendering_commutes() {
        let mut a = blank();
        let mut b = blank();
        render_hit(&mut a, 10.0, 10.0, 300.0, 1.5);
        render_hit(&mut a, 11.5, 10.5, 500.0, 1.5);
        render_hit(&mut b, 11.5, 10.5, 500.0, 1.5);
        render_hit(&mut b, 10.0, 10.0, 300.0, 1.5);
        assert_eq!(a, b);
    }

    #[test]
    fn edge_spot_is_clipped() {
        let mut f = blank();
        render_hit(&mut f, 0.0, 0.0, 400.0, 1.5);
        let t = f.total();
        assert!(t > 50 && t < 400, "{t}");
    }

    #[test]
    fn readout_statistics() {
        let noise = ReadoutNoise::new(4.0, 100.0);
        let mut f = Frame::new(0, 400, 250, GateMode::TimeDependent);
        noise.apply(&mut f, &mut ChaCha8Rng::seed_from_u64(9));
        let n = f.pixels.len() as f64;
        let mean = f.pixels.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = f.pixels.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        assert!((mean - 100.0).abs() < 0.05, "{mean}");
        // Integer rounding adds 1/12 to the variance.
        assert!((var.sqrt() - (16.0f64 + 1.0 / 12.0).sqrt()).abs() < 0.05, "{}", var.sqrt());
    }

    #[test]
    fn zero_bias_noise_clamps_at_zero() {
        let noise = ReadoutNoise::new(2.0, 0.0);
        let mut f = blank();
        noise.apply(&mut f, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(f.pixels.contains(&0));
        assert!(f.pixels.iter().all(|&v| v < 20));
    }
}
