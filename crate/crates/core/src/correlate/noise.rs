use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectrum::{separable_joint, JointSpectrum, SpectralMarginal};

/// How the noise base is scaled before subtraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseScale {
    Fixed(f64),
    /// Ratio of means over a border of this many cells around the matrix.
    Margin(usize),
}

/// Separable expectation `p_s ⊗ p_i` of uncorrelated photons.
pub fn empirical_product(p_s: &SpectralMarginal, p_i: &SpectralMarginal) -> Result<JointSpectrum> {
    separable_joint(p_s, p_i)
}

fn in_margin(r: usize, c: usize, shape: (usize, usize), m: usize) -> bool {
    r < m || c < m || r + m >= shape.0 || c + m >= shape.1
}

/// Off-support estimate of λ: mean of `raw` over the border divided by the
/// mean of `noise` there.
pub fn estimate_noise_scale(raw: &Matrix, noise: &Matrix, margin: usize) -> Result<f64> {
    raw.ensure_same_shape(noise)?;
    if margin == 0 {
        return Err(Error::InvalidParameter("noise margin must be at least 1 cell".into()));
    }
    let shape = raw.shape();
    let (mut sr, mut sn) = (0.0, 0.0);
    for r in 0..shape.0 {
        for c in 0..shape.1 {
            if in_margin(r, c, shape, margin) {
                sr += raw.get(r, c);
                sn += noise.get(r, c);
            }
        }
    }
    if !(sn > 0.0) {
        return Err(Error::InvalidParameter(
            "noise base is zero over the estimation margin".into(),
        ));
    }
    Ok(sr / sn)
}

/// `max(raw − λ·noise, 0)`, renormalized. Returns the result and the λ used.
pub fn subtract_noise(raw: &JointSpectrum, noise: &JointSpectrum, scale: NoiseScale) -> Result<(JointSpectrum, f64)> {
    raw.values().ensure_same_shape(noise.values())?;
    let lambda = match scale {
        NoiseScale::Fixed(l) if l >= 0.0 && l.is_finite() => l,
        NoiseScale::Fixed(l) => {
            return Err(Error::InvalidParameter(format!("noise scale {l} must be non-negative")))
        }
        NoiseScale::Margin(m) => estimate_noise_scale(raw.values(), noise.values(), m)?,
    };
    let out = raw
        .values()
        .zip_map(noise.values(), |a, b| (a - lambda * b).max(0.0))?;
    if !(out.sum() > 0.0) {
        return Err(Error::EmptyResult("noise subtraction removed everything".into()));
    }
    Ok((JointSpectrum::normalized(raw.grid().clone(), out)?, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::FrequencyGrid;

    fn spectrum(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> JointSpectrum {
        let grid = FrequencyGrid::uniform(780.0, 0.74, rows, 780.0, 0.74, cols).unwrap();
        JointSpectrum::normalized(grid, Matrix::from_fn(rows, cols, f)).unwrap()
    }

    #[test]
    fn zero_scale_is_identity() {
        let raw = spectrum(4, 5, |r, c| (r * 5 + c) as f64);
        let n = spectrum(4, 5, |_, _| 1.0);
        let (out, l) = subtract_noise(&raw, &n, NoiseScale::Fixed(0.0)).unwrap();
        assert_eq!(l, 0.0);
        for (a, b) in out.values().as_slice().iter().zip(raw.values().as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn full_cancellation_is_an_error() {
        let n = spectrum(4, 5, |r, c| 1.0 + (r + c) as f64);
        assert!(matches!(
            subtract_noise(&n, &n, NoiseScale::Fixed(1.0)),
            Err(Error::EmptyResult(_))
        ));
    }

    #[test]
    fn margin_estimator_recovers_flat_base() {
        // Central blob plus a flat base carrying 40% of the mass.
        let blob = |r: usize, c: usize| if (3..7).contains(&r) && (3..7).contains(&c) { 1.0 } else { 0.0 };
        let raw = spectrum(10, 10, |r, c| 0.6 * blob(r, c) / 16.0 + 0.4 / 100.0);
        let flat = spectrum(10, 10, |_, _| 1.0);
        let (out, l) = subtract_noise(&raw, &flat, NoiseScale::Margin(2)).unwrap();
        assert!((l - 0.4).abs() < 1e-12);
        for r in 0..10 {
            for c in 0..10 {
                assert!((out.get(r, c) - blob(r, c) / 16.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn negative_scale_rejected() {
        let n = spectrum(2, 2, |_, _| 1.0);
        assert!(subtract_noise(&n, &n, NoiseScale::Fixed(-1.0)).is_err());
    }

    #[test]
    fn product_of_marginals() {
        let ps = SpectralMarginal::new(vec![779.0, 780.0], vec![0.25, 0.75]).unwrap();
        let pi = SpectralMarginal::new(vec![779.0, 780.0, 781.0], vec![0.5, 0.5, 0.0]).unwrap();
        let p = empirical_product(&ps, &pi).unwrap();
        assert!((p.get(1, 0) - 0.375).abs() < 1e-15);
        assert_eq!(p.get(0, 2), 0.0);
    }
}
