use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::matrix::Matrix;

/// Complex 2-D spectrum stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2 {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Spectrum2 {
    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.data[u * self.cols + v]
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn transform(rows: usize, cols: usize, data: &mut [Complex64], inverse: bool) {
    if rows == 0 || cols == 0 {
        return;
    }
    let mut planner = FftPlanner::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(cols), planner.plan_fft_inverse(rows))
    } else {
        (planner.plan_fft_forward(cols), planner.plan_fft_forward(rows))
    };
    row_fft.process(data);
    let mut column = vec![Complex64::default(); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
    let scale = 1.0 / ((rows * cols) as f64).sqrt();
    for z in data.iter_mut() {
        *z *= scale;
    }
}

/// Unitary 2-D discrete Fourier transform.
pub fn dft2(m: &Matrix) -> Spectrum2 {
    let (rows, cols) = m.shape();
    let mut data: Vec<Complex64> = m.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(rows, cols, &mut data, false);
    Spectrum2 { rows, cols, data }
}

/// Inverse of [`dft2`], keeping the real part.
pub fn idft2(s: &Spectrum2) -> Matrix {
    let mut data = s.data.clone();
    transform(s.rows, s.cols, &mut data, true);
    Matrix::from_vec(s.rows, s.cols, data.into_iter().map(|z| z.re).collect())
        .expect("consistent dimensions")
}
