use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};

use super::camera::{CameraConfig, SourceConfig};
use super::frame::Frame;
use super::map::{RegionMap, SpatialMap};
use super::render::{render_hit, ReadoutNoise};
use super::sampler::PairSampler;
use crate::error::{Error, Result};
use crate::geometry::RegionLabel;
use crate::spectrum::JointSpectrum;

/// Ground truth of one rendered event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruePhoton {
    /// `None` for dark events.
    pub label: Option<RegionLabel>,
    pub wavelength_nm: Option<f64>,
    pub x: f64,
    pub y: f64,
    /// Integrated counts before rounding.
    pub counts: f64,
    /// Pump pulse within the gate; `u64::MAX` for dark events.
    pub pulse: u64,
}

#[derive(Debug, Clone)]
pub struct SimulatedFrame {
    pub frame: Frame,
    pub photons: Vec<TruePhoton>,
}

/// Generates gated camera frames of photon pairs drawn from a joint spectrum.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    sampler: PairSampler,
    source: SourceConfig,
    camera: CameraConfig,
    map: SpatialMap,
    readout: ReadoutNoise,
}

impl FrameSimulator {
    pub fn new(
        spectrum: &JointSpectrum,
        source: SourceConfig,
        camera: CameraConfig,
        map: SpatialMap,
    ) -> Result<Self> {
        source.validate()?;
        camera.validate()?;
        map.validate()?;
        for region in [&map.signal, &map.idler] {
            if !region.bbox.fits_within(camera.width, camera.height) {
                return Err(Error::InvalidParameter(format!(
                    "region box {:?} exceeds the {}x{} sensor",
                    region.bbox, camera.width, camera.height
                )));
            }
        }
        let sampler = PairSampler::new(spectrum)?;
        check_covered("signal", sampler.signal_range(), &map.signal)?;
        check_covered("idler", sampler.idler_range(), &map.idler)?;
        Ok(Self {
            sampler,
            source,
            camera,
            map,
            readout: ReadoutNoise::new(camera.readout_sigma, camera.bias),
        })
    }

    pub fn camera(&self) -> &CameraConfig {
        &self.camera
    }

    pub fn source(&self) -> &SourceConfig {
        &self.source
    }

    pub fn map(&self) -> &SpatialMap {
        &self.map
    }

    /// Independent generator of frame `index` under `master_seed`.
    pub fn frame_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        rng
    }

    /// Frame `index` of the stream seeded by `master_seed`.
    pub fn frame(&self, master_seed: u64, index: u64) -> Frame {
        self.frame_detailed(master_seed, index).frame
    }

    pub fn frame_detailed(&self, master_seed: u64, index: u64) -> SimulatedFrame {
        self.simulate_frame(index, &mut Self::frame_rng(master_seed, index))
    }

    /// Renders one gate: pairs per pump pulse, losses, spots, dark events and
    /// readout noise.
    pub fn simulate_frame<R: Rng + ?Sized>(&self, index: u64, rng: &mut R) -> SimulatedFrame {
        let cam = &self.camera;
        let mut frame = Frame::new(index, cam.width, cam.height, cam.gate_mode);
        let mut photons = Vec::new();
        let p_detect = self.source.detection_probability(cam);
        let cap = cam.max_photons_per_frame.unwrap_or(usize::MAX);

        let pulses = cam.pulses_per_frame();
        let pairs = if self.source.excitation_probability >= 1.0 {
            pulses
        } else if self.source.excitation_probability <= 0.0 {
            0
        } else {
            Binomial::new(pulses, self.source.excitation_probability)
                .expect("validated probability")
                .sample(rng)
        };
        // Pulses within the gate are exchangeable, so pairs are assigned to
        // consecutive pulse slots.
        for pulse in 0..pairs {
            let signal_ok = rng.random::<f64>() < p_detect;
            let idler_ok = rng.random::<f64>() < p_detect;
            if !signal_ok && !idler_ok {
                continue;
            }
            let (ls, li) = self.sampler.sample(rng);
            for (ok, label, wavelength) in [
                (signal_ok, RegionLabel::Signal, ls),
                (idler_ok, RegionLabel::Idler, li),
            ] {
                if ok && photons.len() < cap {
                    let p = self.place(label, wavelength, pulse, rng);
                    render_hit(&mut frame, p.x, p.y, p.counts, cam.psf_sigma);
                    photons.push(p);
                }
            }
        }

        let mean_dark = cam.dark_rate * (cam.width * cam.height) as f64;
        if mean_dark > 0.0 {
            let n = Poisson::new(mean_dark).expect("positive mean").sample(rng) as u64;
            for _ in 0..n {
                let x = rng.random::<f64>() * cam.width as f64 - 0.5;
                let y = rng.random::<f64>() * cam.height as f64 - 0.5;
                let counts = self.hit_counts(rng);
                render_hit(&mut frame, x, y, counts, cam.psf_sigma);
                photons.push(TruePhoton {
                    label: None,
                    wavelength_nm: None,
                    x,
                    y,
                    counts,
                    pulse: u64::MAX,
                });
            }
        }

        self.readout.apply(&mut frame, rng);
        SimulatedFrame { frame, photons }
    }

    fn hit_counts<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.camera.gain_sigma;
        if s == 0.0 {
            return self.camera.gain;
        }
        let z: f64 = rng.sample(StandardNormal);
        self.camera.gain * (s * z - 0.5 * s * s).exp()
    }

    fn place<R: Rng + ?Sized>(
        &self,
        label: RegionLabel,
        wavelength_nm: f64,
        pulse: u64,
        rng: &mut R,
    ) -> TruePhoton {
        let region = self.map.region(label);
        let (a, b) = region.pixel_extent();
        let along = region
            .wavelength_to_pixel(wavelength_nm)
            .clamp(a, b - 1e-9);
        let (c0, c1) = region.bbox.cross_span(region.axis);
        let jitter: f64 = rng.sample::<f64, _>(StandardNormal) * self.camera.psf_sigma;
        let across = (region.band_center + jitter).clamp(c0 as f64, c1 as f64 - 1.0);
        let (x, y) = match region.axis {
            crate::geometry::DispersionAxis::X => (along, across),
            crate::geometry::DispersionAxis::Y => (across, along),
        };
        TruePhoton {
            label: Some(label),
            wavelength_nm: Some(wavelength_nm),
            x,
            y,
            counts: self.hit_counts(rng),
            pulse,
        }
    }
}

/// The spectrum grid must not extend past the region's mapped wavelengths.
fn check_covered(name: &str, (lo, hi): (f64, f64), region: &RegionMap) -> Result<()> {
    let (min_nm, max_nm) = region.wavelength_range();
    let tol = 1e-9 * max_nm;
    if lo < min_nm - tol || hi > max_nm + tol {
        return Err(Error::InvalidParameter(format!(
            "{name} spectrum spans [{lo:.4}, {hi:.4}] nm but the region maps only [{min_nm:.4}, {max_nm:.4}] nm"
        )));
    }
    Ok(())
}
