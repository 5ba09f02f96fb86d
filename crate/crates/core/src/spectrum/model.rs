//! Analytic joint spectral intensity of down-converted photon pairs and the
//! separable, filtered and noise variants built from it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dispersion::Dispersion;
use super::filter::FilterSpec;
use super::grid::{bandwidth_nm_to_omega, wavelength_to_omega, FrequencyGrid, SPEED_OF_LIGHT};
use super::joint::{JointSpectrum, SpectralMarginal, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Time-bandwidth product of a transform-limited Gaussian pulse.
const GAUSSIAN_TBP: f64 = 0.441;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PumpSpec {
    pub center_nm: f64,
    /// FWHM of the pump intensity spectrum, nm.
    pub bandwidth_nm: f64,
}

impl PumpSpec {
    /// Bandwidth of a transform-limited Gaussian pulse of the given duration.
    pub fn from_pulse_duration(center_nm: f64, duration_fs: f64) -> Self {
        let dnu = GAUSSIAN_TBP / (duration_fs * 1e-15);
        let lambda = center_nm * 1e-9;
        Self {
            center_nm,
            bandwidth_nm: lambda * lambda * dnu / SPEED_OF_LIGHT * 1e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_nm > 0.0) || !(self.bandwidth_nm > 0.0) {
            return Err(Error::InvalidParameter(
                "pump center and bandwidth must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn center_omega(&self) -> f64 {
        wavelength_to_omega(self.center_nm)
    }

    pub fn bandwidth_omega(&self) -> f64 {
        bandwidth_nm_to_omega(self.center_nm, self.bandwidth_nm)
    }
}

impl Default for PumpSpec {
    /// 130 fs pulse, frequency doubled to 390 nm.
    fn default() -> Self {
        Self::from_pulse_duration(390.0, 130.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMatchingType {
    TypeI,
    TypeII,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrystalSpec {
    pub length_mm: f64,
    #[serde(default = "default_pm_type", rename = "type")]
    pub phase_matching: PhaseMatchingType,
}

fn default_pm_type() -> PhaseMatchingType {
    PhaseMatchingType::TypeII
}

impl CrystalSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_mm > 0.0) {
            return Err(Error::InvalidParameter("crystal length must be positive".into()));
        }
        Ok(())
    }
}

impl Default for CrystalSpec {
    fn default() -> Self {
        Self {
            length_mm: 2.0,
            phase_matching: PhaseMatchingType::TypeII,
        }
    }
}

/// Gaussian pump amplitude at the pair's total frequency; 1 at the pump
/// center, |α|² = ½ at half the intensity FWHM.
pub fn pump_envelope(omega_sum: f64, pump: &PumpSpec) -> f64 {
    let detuning = omega_sum - pump.center_omega();
    let width = pump.bandwidth_omega();
    (-2.0 * std::f64::consts::LN_2 * detuning * detuning / (width * width)).exp()
}

#[inline]
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Half the mismatch phase accumulated over the crystal, (L/2)·Δk.
pub fn mismatch_phase(
    omega_s: f64,
    omega_i: f64,
    crystal: &CrystalSpec,
    disp: &dyn Dispersion,
) -> Result<f64> {
    Ok(0.5 * crystal.length_mm * disp.mismatch(omega_s, omega_i)?)
}

/// sinc(Δ)·exp(−iΔ) with Δ = (L/2)·[k_p(ω_s+ω_i) − k_s(ω_s) − k_i(ω_i)].
pub fn phase_matching(
    omega_s: f64,
    omega_i: f64,
    crystal: &CrystalSpec,
    disp: &dyn Dispersion,
) -> Result<Complex64> {
    let delta = mismatch_phase(omega_s, omega_i, crystal, disp)?;
    Ok(Complex64::from_polar(sinc(delta), -delta))
}

/// |α(ω_s+ω_i)·φ(ω_s,ω_i)|² at every grid point, normalized to unit sum.
pub fn joint_spectral_intensity(
    grid: &FrequencyGrid,
    pump: &PumpSpec,
    crystal: &CrystalSpec,
    disp: &dyn Dispersion,
) -> Result<JointSpectrum> {
    pump.validate()?;
    crystal.validate()?;
    let ws = grid.signal_omega();
    let wi = grid.idler_omega();
    let mut values = Matrix::zeros(ws.len(), wi.len());
    for (r, &s) in ws.iter().enumerate() {
        for (c, &i) in wi.iter().enumerate() {
            let amplitude = pump_envelope(s + i, pump) * phase_matching(s, i, crystal, disp)?;
            values.set(r, c, amplitude.norm_sqr());
        }
    }
    JointSpectrum::normalized(grid.clone(), values)
}

fn normalized_probabilities(p: &SpectralMarginal) -> Result<Vec<f64>> {
    if p.is_normalized() {
        Ok(p.probabilities().to_vec())
    } else {
        Ok(p.clone().normalize()?.probabilities().to_vec())
    }
}

/// Outer product p_s ⊗ p_i: the joint spectrum of uncorrelated photons.
pub fn separable_joint(p_s: &SpectralMarginal, p_i: &SpectralMarginal) -> Result<JointSpectrum> {
    let ps = normalized_probabilities(p_s)?;
    let pi = normalized_probabilities(p_i)?;
    let values = Matrix::from_fn(ps.len(), pi.len(), |r, c| ps[r] * pi[c]);
    let grid = FrequencyGrid::new(p_s.axis_nm().to_vec(), p_i.axis_nm().to_vec())?;
    let spectrum = JointSpectrum::new(grid, values)?;
    if spectrum.is_normalized() {
        Ok(spectrum)
    } else {
        spectrum.normalize()
    }
}

/// As [`separable_joint`], but checked against a target grid's shape.
pub fn separable_joint_on(
    grid: &FrequencyGrid,
    p_s: &SpectralMarginal,
    p_i: &SpectralMarginal,
) -> Result<JointSpectrum> {
    let found = (p_s.len(), p_i.len());
    if found != grid.shape() {
        return Err(Error::ShapeMismatch {
            expected: grid.shape(),
            found,
        });
    }
    separable_joint(p_s, p_i)
}

/// G = g_s ⊗ g_i, transmission of the two band-pass filters. Not normalized.
pub fn scissors_matrix(
    filter_s: &FilterSpec,
    filter_i: &FilterSpec,
    grid: &FrequencyGrid,
) -> Result<JointSpectrum> {
    filter_s.validate()?;
    filter_i.validate()?;
    let gs: Vec<f64> = grid.signal_nm().iter().map(|&l| filter_s.transmission(l)).collect();
    let gi: Vec<f64> = grid.idler_nm().iter().map(|&l| filter_i.transmission(l)).collect();
    let values = Matrix::from_fn(gs.len(), gi.len(), |r, c| gs[r] * gi[c]);
    JointSpectrum::unnormalized(grid.clone(), values)
}

/// Element-wise product S·G, renormalized.
pub fn apply_scissors(spectrum: &JointSpectrum, scissors: &JointSpectrum) -> Result<JointSpectrum> {
    let product = spectrum.values().zip_map(scissors.values(), |s, g| s * g)?;
    JointSpectrum::normalized(spectrum.grid().clone(), product)
}

/// Row sums (signal) and column sums (idler).
pub fn marginals(spectrum: &JointSpectrum) -> Result<(SpectralMarginal, SpectralMarginal)> {
    let sum = spectrum.sum();
    if !(sum > 0.0) {
        return Err(Error::EmptySpectrum);
    }
    let scale = |v: Vec<f64>| -> Vec<f64> {
        if (sum - 1.0).abs() <= NORMALIZATION_TOLERANCE {
            v
        } else {
            v.into_iter().map(|x| x / sum).collect()
        }
    };
    let ps = scale(spectrum.values().row_sums());
    let pi = scale(spectrum.values().col_sums());
    Ok((
        SpectralMarginal::new(spectrum.grid().signal_nm().to_vec(), ps)?,
        SpectralMarginal::new(spectrum.grid().idler_nm().to_vec(), pi)?,
    ))
}

/// N = p_ns ⊗ p_ni, the separable background of uncorrelated detections.
pub fn noise_matrix(p_ns: &SpectralMarginal, p_ni: &SpectralMarginal) -> Result<JointSpectrum> {
    separable_joint(p_ns, p_ni)
}
