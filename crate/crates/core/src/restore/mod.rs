//! Fourier-domain restoration of segmented matrices and matrix comparison.

mod compare;
mod fft;
mod filter;

pub use compare::{bhattacharyya, compare, ComparisonReport};
pub use fft::{dft2, idft2, Spectrum2};
pub use filter::{fourier_filter, fourier_filter_unclamped, FourierMask, DEFAULT_RADIUS_DIVISOR};
