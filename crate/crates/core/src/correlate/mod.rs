//! Coincidence counting, marginals and noise-base removal.

mod accumulator;
mod noise;

pub use accumulator::{CorrelationAccumulator, CorrelationMatrix, Finalized, RateReport};
pub use noise::{empirical_product, estimate_noise_scale, subtract_noise, NoiseScale};
