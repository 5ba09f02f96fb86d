use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sim::Frame;

/// Exact per-pixel sum of a set of frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccumulatedImage {
    pub width: usize,
    pub height: usize,
    pub sums: Vec<u64>,
    pub frames: u64,
}

impl AccumulatedImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            sums: vec![0; width * height],
            frames: 0,
        }
    }

    pub fn add(&mut self, frame: &Frame) -> Result<()> {
        if frame.width != self.width || frame.height != self.height {
            return Err(Error::ShapeMismatch {
                expected: (self.height, self.width),
                found: (frame.height, frame.width),
            });
        }
        for (s, &p) in self.sums.iter_mut().zip(&frame.pixels) {
            *s += p as u64;
        }
        self.frames += 1;
        Ok(())
    }

    pub fn merge(mut self, other: &AccumulatedImage) -> Result<Self> {
        if (other.width, other.height) != (self.width, self.height) {
            return Err(Error::ShapeMismatch {
                expected: (self.height, self.width),
                found: (other.height, other.width),
            });
        }
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            *s += o;
        }
        self.frames += other.frames;
        Ok(self)
    }

    /// Per-frame mean, rows = image rows.
    pub fn mean(&self) -> Matrix {
        let n = self.frames.max(1) as f64;
        Matrix::from_vec(
            self.height,
            self.width,
            self.sums.iter().map(|&s| s as f64 / n).collect(),
        )
        .expect("consistent dimensions")
    }
}

/// Sums a non-empty stream of equally sized frames.
pub fn accumulate<'a>(frames: impl IntoIterator<Item = &'a Frame>) -> Result<AccumulatedImage> {
    let mut iter = frames.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("cannot accumulate an empty stream".into()))?;
    let mut acc = AccumulatedImage::new(first.width, first.height);
    acc.add(first)?;
    for f in iter {
        acc.add(f)?;
    }
    Ok(acc)
}
