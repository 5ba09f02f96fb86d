use rand::Rng;

use crate::error::Result;
use crate::spectrum::{cell_edges, JointSpectrum};

/// Draws (λ_s, λ_i) pairs from a normalized joint spectrum: a cell with its
/// probability, then a uniform position inside that cell.
#[derive(Debug, Clone)]
pub struct PairSampler {
    cdf: Vec<f64>,
    cols: usize,
    signal_cells: Vec<(f64, f64)>,
    idler_cells: Vec<(f64, f64)>,
}

impl PairSampler {
    pub fn new(spectrum: &JointSpectrum) -> Result<Self> {
        spectrum.require_normalized()?;
        let values = spectrum.values().as_slice();
        let mut cdf = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for &v in values {
            acc += v;
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self {
            cdf,
            cols: spectrum.shape().1,
            signal_cells: cell_edges(spectrum.grid().signal_nm()),
            idler_cells: cell_edges(spectrum.grid().idler_nm()),
        })
    }

    /// Row and column of a cell drawn with its probability.
    pub fn sample_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let u: f64 = rng.random();
        // First cell whose cumulative mass exceeds u; never a zero-mass cell.
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        (k / self.cols, k % self.cols)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let (r, c) = self.sample_cell(rng);
        let (s0, s1) = self.signal_cells[r];
        let (i0, i1) = self.idler_cells[c];
        let ls = s0 + (s1 - s0) * rng.random::<f64>();
        let li = i0 + (i1 - i0) * rng.random::<f64>();
        (ls, li)
    }

    /// Wavelength interval spanned by all signal cells, low to high.
    pub fn signal_range(&self) -> (f64, f64) {
        span(&self.signal_cells)
    }

    pub fn idler_range(&self) -> (f64, f64) {
        span(&self.idler_cells)
    }
}

fn span(cells: &[(f64, f64)]) -> (f64, f64) {
    cells.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(a, b)| {
        (lo.min(a).min(b), hi.max(a).max(b))
    })
}

/// One draw from `spectrum`. Builds a sampler per call; reuse
/// [`PairSampler`] for repeated draws.
pub fn sample_pair<R: Rng + ?Sized>(spectrum: &JointSpectrum, rng: &mut R) -> Result<(f64, f64)> {
    Ok(PairSampler::new(spectrum)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::error::Error;
    use crate::matrix::Matrix;
    use crate::spectrum::FrequencyGrid;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(vec![779.0, 780.0, 781.0], vec![779.0, 781.0]).unwrap()
    }

    #[test]
    fn delta_spectrum_always_hits_its_cell() {
        let mut m = Matrix::zeros(3, 2);
        m.set(1, 1, 1.0);
        let s = JointSpectrum::new(grid(), m).unwrap();
        let sampler = PairSampler::new(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert_eq!(sampler.sample_cell(&mut rng), (1, 1));
            let (ls, li) = sampler.sample(&mut rng);
            assert!((779.5..780.5).contains(&ls));
            assert!((780.0..782.0).contains(&li));
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let s = JointSpectrum::new(grid(), Matrix::from_vec(3, 2, vec![1.0; 6]).unwrap()).unwrap();
        assert!(matches!(PairSampler::new(&s), Err(Error::Unnormalized { .. })));
    }
}
