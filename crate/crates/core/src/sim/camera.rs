use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pump pulse period of a 77 MHz oscillator, rounded as commonly quoted.
pub const DEFAULT_PULSE_INTERVAL_S: f64 = 12.9e-9;
/// Gate shorter than one pulse period.
pub const DEFAULT_SHORT_GATE_S: f64 = 12.5e-9;
/// Gate spanning hundreds of pulse periods.
pub const DEFAULT_LONG_GATE_S: f64 = 10e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateMode {
    /// Gate synchronized to one pump pulse.
    #[default]
    TimeDependent,
    /// Gate covering many pump pulses.
    TimeIndependent,
}

impl GateMode {
    pub fn tag(self) -> u8 {
        match self {
            GateMode::TimeDependent => 0,
            GateMode::TimeIndependent => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(GateMode::TimeDependent),
            1 => Some(GateMode::TimeIndependent),
            _ => None,
        }
    }

    pub fn default_gate_width(self) -> f64 {
        match self {
            GateMode::TimeDependent => DEFAULT_SHORT_GATE_S,
            GateMode::TimeIndependent => DEFAULT_LONG_GATE_S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraConfig {
    pub width: usize,
    pub height: usize,
    pub quantum_efficiency: f64,
    /// Expected dark events per pixel per gate.
    pub dark_rate: f64,
    /// Standard deviation of the additive readout noise, counts.
    pub readout_sigma: f64,
    /// Constant pedestal added before readout noise, counts.
    pub bias: f64,
    /// Mean integrated counts of one registered photon.
    pub gain: f64,
    /// Lognormal sigma of the per-photon gain factor.
    pub gain_sigma: f64,
    /// Point-spread sigma, pixels.
    pub psf_sigma: f64,
    pub gate_mode: GateMode,
    /// Gate width in seconds; the mode's default when absent.
    pub gate_width_s: Option<f64>,
    pub pulse_interval_s: f64,
    /// Upper bound on rendered photons per frame, dark events excluded.
    pub max_photons_per_frame: Option<usize>,
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            width: 400,
            height: 96,
            quantum_efficiency: 0.20,
            dark_rate: 1e-7,
            readout_sigma: 2.0,
            bias: 100.0,
            gain: 400.0,
            gain_sigma: 0.3,
            psf_sigma: 1.5,
            gate_mode: GateMode::TimeDependent,
            gate_width_s: None,
            pulse_interval_s: DEFAULT_PULSE_INTERVAL_S,
            max_photons_per_frame: None,
        }
    }
}

impl CameraConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.width == 0 || self.height == 0 {
            return bad("camera dimensions must be positive");
        }
        if self.width > u32::MAX as usize || self.height > u32::MAX as usize {
            return bad("camera dimensions exceed 32 bits");
        }
        if !(0.0..=1.0).contains(&self.quantum_efficiency) {
            return bad("quantum efficiency must lie in [0, 1]");
        }
        for (name, v) in [
            ("dark rate", self.dark_rate),
            ("readout sigma", self.readout_sigma),
            ("bias", self.bias),
            ("gain", self.gain),
            ("gain sigma", self.gain_sigma),
            ("PSF sigma", self.psf_sigma),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0")));
            }
        }
        if !(self.gate_width() > 0.0) {
            return bad("gate width must be positive");
        }
        if !(self.pulse_interval_s > 0.0) {
            return bad("pulse interval must be positive");
        }
        Ok(())
    }

    pub fn gate_width(&self) -> f64 {
        self.gate_width_s
            .unwrap_or_else(|| self.gate_mode.default_gate_width())
    }

    /// Pump pulses covered by one gate.
    pub fn pulses_per_frame(&self) -> u64 {
        match self.gate_mode {
            GateMode::TimeDependent => 1,
            GateMode::TimeIndependent => {
                ((self.gate_width() / self.pulse_interval_s).floor() as u64).max(1)
            }
        }
    }

    pub fn with_mode(mut self, mode: GateMode) -> Self {
        self.gate_mode = mode;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceConfig {
    /// Probability that a pump pulse creates a pair.
    pub excitation_probability: f64,
    /// Probability that one photon survives the optics.
    pub transmission: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            excitation_probability: 0.20,
            transmission: 0.50,
        }
    }
}

impl SourceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.excitation_probability)
            || !(0.0..=1.0).contains(&self.transmission)
        {
            return Err(Error::InvalidParameter(
                "source probabilities must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Probability that a single photon is registered by the camera.
    pub fn detection_probability(&self, camera: &CameraConfig) -> f64 {
        self.transmission * camera.quantum_efficiency
    }

    /// Probability that one pulse yields a registered pair.
    pub fn coincidence_probability(&self, camera: &CameraConfig) -> f64 {
        self.excitation_probability * self.detection_probability(camera).powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulses_per_gate() {
        let td = CameraConfig::default();
        assert_eq!(td.pulses_per_frame(), 1);
        let ti = td.with_mode(GateMode::TimeIndependent);
        assert_eq!(ti.gate_width(), 10e-6);
        assert_eq!(ti.pulses_per_frame(), 775);
    }

    #[test]
    fn default_pair_registration_rate() {
        let p = SourceConfig::default().coincidence_probability(&CameraConfig::default());
        assert!((p - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let c = CameraConfig { quantum_efficiency: 1.5, ..Default::default() };
        assert!(c.validate().is_err());
        let c = CameraConfig { gate_width_s: Some(0.0), ..Default::default() };
        assert!(c.validate().is_err());
        let s = SourceConfig {
            excitation_probability: -0.1,
            transmission: 0.5,
        };
        assert!(s.validate().is_err());
    }
}
