//! Wavenumber models for the pump, signal and idler beams.
//!
//! Wavenumbers are in rad/mm, angular frequencies in rad/s.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::{wavelength_to_omega, SPEED_OF_LIGHT_MM};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Beam {
    Pump,
    Signal,
    Idler,
}

impl Beam {
    fn index(self) -> usize {
        match self {
            Beam::Pump => 0,
            Beam::Signal => 1,
            Beam::Idler => 2,
        }
    }
}

/// Evaluates k(ω) for each of the three interacting beams.
pub trait Dispersion: Send + Sync {
    fn wavenumber(&self, beam: Beam, omega: f64) -> Result<f64>;

    /// Wavevector mismatch k_p(ω_s + ω_i) − k_s(ω_s) − k_i(ω_i).
    fn mismatch(&self, omega_s: f64, omega_i: f64) -> Result<f64> {
        let kp = self.wavenumber(Beam::Pump, omega_s + omega_i)?;
        let ks = self.wavenumber(Beam::Signal, omega_s)?;
        let ki = self.wavenumber(Beam::Idler, omega_i)?;
        let dk = kp - ks - ki;
        if !dk.is_finite() {
            return Err(Error::Dispersion(format!(
                "non-finite mismatch at ω_s = {omega_s:e}, ω_i = {omega_i:e}"
            )));
        }
        Ok(dk)
    }
}

/// First-order expansion k(ω) = k₀ + (ω − ω₀)/v_g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearWavenumber {
    pub omega0: f64,
    pub k0: f64,
    /// 1/v_g in s/mm.
    pub inverse_group_velocity: f64,
}

impl LinearWavenumber {
    #[inline]
    pub fn eval(&self, omega: f64) -> f64 {
        self.k0 + (omega - self.omega0) * self.inverse_group_velocity
    }
}

/// Group indices n_g = c/v_g of the three beams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupIndices {
    pub pump: f64,
    pub signal: f64,
    pub idler: f64,
}

impl Default for GroupIndices {
    /// Pump group velocity between those of signal and idler, which tilts the
    /// phase-matching band against the pump band and yields an oblique,
    /// negatively correlated joint spectrum.
    fn default() -> Self {
        Self {
            pump: 1.70,
            signal: 1.66,
            idler: 1.71,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDispersion {
    pub pump: LinearWavenumber,
    pub signal: LinearWavenumber,
    pub idler: LinearWavenumber,
}

impl LinearDispersion {
    /// Linear model expanded around the degenerate point of a pump at
    /// `pump_center_nm`. The mismatch at the degenerate point equals
    /// `mismatch_offset` (rad/mm); zero means perfect phase matching there.
    pub fn from_group_indices(
        pump_center_nm: f64,
        indices: GroupIndices,
        mismatch_offset: f64,
    ) -> Result<Self> {
        if !(pump_center_nm > 0.0) {
            return Err(Error::InvalidParameter(
                "pump center wavelength must be positive".into(),
            ));
        }
        for (name, n) in [
            ("pump", indices.pump),
            ("signal", indices.signal),
            ("idler", indices.idler),
        ] {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} group index must be finite and positive"
                )));
            }
        }
        let wp = wavelength_to_omega(pump_center_nm);
        let w0 = wp / 2.0;
        // Phase indices only enter through the mismatch at the expansion
        // point, so the group indices stand in for them.
        let ks0 = indices.signal * w0 / SPEED_OF_LIGHT_MM;
        let ki0 = indices.idler * w0 / SPEED_OF_LIGHT_MM;
        Ok(Self {
            pump: LinearWavenumber {
                omega0: wp,
                k0: ks0 + ki0 + mismatch_offset,
                inverse_group_velocity: indices.pump / SPEED_OF_LIGHT_MM,
            },
            signal: LinearWavenumber {
                omega0: w0,
                k0: ks0,
                inverse_group_velocity: indices.signal / SPEED_OF_LIGHT_MM,
            },
            idler: LinearWavenumber {
                omega0: w0,
                k0: ki0,
                inverse_group_velocity: indices.idler / SPEED_OF_LIGHT_MM,
            },
        })
    }
}

impl Default for LinearDispersion {
    fn default() -> Self {
        Self::from_group_indices(390.0, GroupIndices::default(), 0.0)
            .expect("default group indices are valid")
    }
}

impl Dispersion for LinearDispersion {
    fn wavenumber(&self, beam: Beam, omega: f64) -> Result<f64> {
        Ok(match beam {
            Beam::Pump => self.pump.eval(omega),
            Beam::Signal => self.signal.eval(omega),
            Beam::Idler => self.idler.eval(omega),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    omega: Vec<f64>,
    k: Vec<f64>,
}

impl Table {
    fn eval(&self, omega: f64) -> Option<f64> {
        let n = self.omega.len();
        if n == 0 || omega < self.omega[0] || omega > self.omega[n - 1] {
            return None;
        }
        if n == 1 {
            return Some(self.k[0]);
        }
        let hi = self.omega.partition_point(|&w| w < omega).clamp(1, n - 1);
        let lo = hi - 1;
        let t = (omega - self.omega[lo]) / (self.omega[hi] - self.omega[lo]);
        Some(self.k[lo] + t * (self.k[hi] - self.k[lo]))
    }
}

/// Sampled wavenumbers, linearly interpolated in ω. Evaluating outside a
/// beam's table is an error.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDispersion {
    tables: [Table; 3],
}

#[derive(Debug, Deserialize)]
struct TableRow {
    beam: Beam,
    wavelength_nm: f64,
    k_rad_per_mm: f64,
}

impl TabulatedDispersion {
    /// Builds from `(beam, wavelength_nm, k_rad_per_mm)` samples. Every beam
    /// needs at least one sample.
    pub fn from_samples(samples: impl IntoIterator<Item = (Beam, f64, f64)>) -> Result<Self> {
        let mut raw: [Vec<(f64, f64)>; 3] = Default::default();
        for (beam, wavelength_nm, k) in samples {
            if !(wavelength_nm > 0.0) || !k.is_finite() {
                return Err(Error::Dispersion(format!(
                    "invalid {beam:?} sample ({wavelength_nm} nm, {k} rad/mm)"
                )));
            }
            raw[beam.index()].push((wavelength_to_omega(wavelength_nm), k));
        }
        let mut tables: Vec<Table> = Vec::with_capacity(3);
        for (idx, mut samples) in raw.into_iter().enumerate() {
            if samples.is_empty() {
                let beam = [Beam::Pump, Beam::Signal, Beam::Idler][idx];
                return Err(Error::Dispersion(format!("no samples for {beam:?}")));
            }
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            if samples.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Dispersion("duplicate wavelength in table".into()));
            }
            tables.push(Table {
                omega: samples.iter().map(|s| s.0).collect(),
                k: samples.iter().map(|s| s.1).collect(),
            });
        }
        let tables: [Table; 3] = tables.try_into().expect("three tables");
        Ok(Self { tables })
    }

    /// Parses CSV with header `beam,wavelength_nm,k_rad_per_mm`.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut samples = Vec::new();
        for row in reader.deserialize::<TableRow>() {
            let row = row.map_err(|e| Error::Dispersion(format!("dispersion table: {e}")))?;
            samples.push((row.beam, row.wavelength_nm, row.k_rad_per_mm));
        }
        Self::from_samples(samples)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }
}

impl Dispersion for TabulatedDispersion {
    fn wavenumber(&self, beam: Beam, omega: f64) -> Result<f64> {
        self.tables[beam.index()].eval(omega).ok_or_else(|| {
            Error::Dispersion(format!("{beam:?} table does not cover ω = {omega:e} rad/s"))
        })
    }
}

/// Config-selectable dispersion model.
#[derive(Debug, Clone, PartialEq)]
pub enum DispersionModel {
    Linear(LinearDispersion),
    Tabulated(TabulatedDispersion),
}

impl Default for DispersionModel {
    fn default() -> Self {
        DispersionModel::Linear(LinearDispersion::default())
    }
}

impl Dispersion for DispersionModel {
    fn wavenumber(&self, beam: Beam, omega: f64) -> Result<f64> {
        match self {
            DispersionModel::Linear(d) => d.wavenumber(beam, omega),
            DispersionModel::Tabulated(d) => d.wavenumber(beam, omega),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_model_is_matched_at_degeneracy() {
        let d = LinearDispersion::default();
        let w = wavelength_to_omega(780.0);
        assert!(d.mismatch(w, w).unwrap().abs() < 1e-9);
    }

    #[test]
    fn linear_mismatch_offset() {
        let d = LinearDispersion::from_group_indices(390.0, GroupIndices::default(), 0.25).unwrap();
        let w = wavelength_to_omega(780.0);
        assert!((d.mismatch(w, w).unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn linear_slope_matches_group_index() {
        let d = LinearDispersion::default();
        let w = wavelength_to_omega(780.0);
        let dw = 1e12;
        let dk = d.wavenumber(Beam::Signal, w + dw).unwrap() - d.wavenumber(Beam::Signal, w).unwrap();
        assert!((dk / dw - 1.66 / SPEED_OF_LIGHT_MM).abs() < 1e-20);
    }

    #[test]
    fn tabulated_interpolates_and_rejects_outside() {
        let csv = "beam,wavelength_nm,k_rad_per_mm\n\
                   # comment line\n\
                   pump,380,27000\npump,400,26000\n\
                   signal,760,13500\nsignal,800,13000\n\
                   idler,760,13400\nidler,800,12900\n";
        let d = TabulatedDispersion::from_csv_str(csv).unwrap();
        let w_lo = wavelength_to_omega(800.0);
        let w_hi = wavelength_to_omega(760.0);
        let mid = 0.5 * (w_lo + w_hi);
        let k = d.wavenumber(Beam::Signal, mid).unwrap();
        assert!((k - 13250.0).abs() < 1e-9);
        assert!(d.wavenumber(Beam::Signal, wavelength_to_omega(700.0)).is_err());
        assert!(matches!(
            d.mismatch(wavelength_to_omega(700.0), wavelength_to_omega(780.0)),
            Err(Error::Dispersion(_))
        ));
    }

    #[test]
    fn tabulated_requires_all_beams() {
        let csv = "beam,wavelength_nm,k_rad_per_mm\npump,390,1\nsignal,780,1\n";
        assert!(TabulatedDispersion::from_csv_str(csv).is_err());
    }
}
