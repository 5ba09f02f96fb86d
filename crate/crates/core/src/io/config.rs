use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlate::NoiseScale;
use crate::detect::{Calibration, DetectionParams};
use crate::error::{Error, Result};
use crate::restore::FourierMask;
use crate::sim::{CameraConfig, FrameSimulator, SourceConfig, SpatialMap};
use crate::spectrum::{
    apply_scissors, joint_spectral_intensity, marginals, scissors_matrix, separable_joint,
    CrystalSpec, DispersionModel, FilterSpec, GroupIndices, JointSpectrum, LinearDispersion,
    PumpSpec, TabulatedDispersion,
};

/// Wavenumber model selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum DispersionConfig {
    Linear {
        #[serde(default)]
        group_indices: GroupIndices,
        /// Constant added to the mismatch at the degenerate point, rad/mm.
        #[serde(default)]
        mismatch_offset: f64,
    },
    /// CSV with columns `beam,wavelength_nm,k_rad_per_mm`; relative paths
    /// resolve against the configuration file's directory.
    Tabulated { table: PathBuf },
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig::Linear {
            group_indices: GroupIndices::default(),
            mismatch_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiltersConfig {
    pub signal: FilterSpec,
    pub idler: FilterSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationConfig {
    pub width_px: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self { width_px: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Border width, in cells, used to estimate the noise scale.
    pub margin: usize,
    /// Fixed noise scale; overrides the border estimate when set.
    pub scale: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            margin: 2,
            scale: None,
        }
    }
}

impl NoiseConfig {
    pub fn noise_scale(&self) -> NoiseScale {
        match self.scale {
            Some(l) => NoiseScale::Fixed(l),
            None => NoiseScale::Margin(self.margin),
        }
    }
}

/// Which joint spectrum a model or simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumKind {
    /// Full pump-envelope × phase-matching spectrum.
    #[default]
    Dependent,
    /// Product of the dependent spectrum's marginals.
    Independent,
    /// Dependent spectrum through the band-pass filters.
    Filtered,
}

impl FromStr for SpectrumKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dependent" | "dep" => Ok(SpectrumKind::Dependent),
            "independent" | "indep" => Ok(SpectrumKind::Independent),
            "filtered" | "scissors" => Ok(SpectrumKind::Filtered),
            other => Err(Error::Config(format!(
                "unknown spectrum `{other}` (expected dependent, independent or filtered)"
            ))),
        }
    }
}

/// Every tunable of a pipeline run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceConfig,
    pub camera: CameraConfig,
    pub map: SpatialMap,
    pub pump: PumpSpec,
    pub crystal: CrystalSpec,
    pub dispersion: DispersionConfig,
    pub filters: FiltersConfig,
    pub detection: DetectionParams,
    pub segmentation: SegmentationConfig,
    pub restore: FourierMask,
    pub noise: NoiseConfig,
    #[serde(skip)]
    base_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parses and fully validates a configuration. `base_dir` anchors relative paths.
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.base_dir = base_dir.map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    /// Checks every section and their mutual consistency.
    pub fn validate(&self) -> Result<()> {
        let wrap = |section: &str, r: Result<()>| {
            r.map_err(|e| Error::Config(format!("[{section}] {e}")))
        };
        wrap("source", self.source.validate())?;
        wrap("camera", self.camera.validate())?;
        wrap("map", self.map.validate())?;
        wrap("pump", self.pump.validate())?;
        wrap("crystal", self.crystal.validate())?;
        wrap("filters", self.filters.signal.validate())?;
        wrap("filters", self.filters.idler.validate())?;
        wrap("detection", self.detection.validate())?;
        wrap("restore", self.restore.validate())?;
        if self.noise.margin == 0 {
            return Err(Error::Config("[noise] margin must be at least 1".into()));
        }
        if let Some(l) = self.noise.scale {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Config("[noise] scale must be non-negative".into()));
            }
        }
        wrap("segmentation", self.calibration().map(|_| ()))?;
        wrap("dispersion", self.dispersion_model().map(|_| ()))?;
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn dispersion_model(&self) -> Result<DispersionModel> {
        Ok(match &self.dispersion {
            DispersionConfig::Linear {
                group_indices,
                mismatch_offset,
            } => DispersionModel::Linear(LinearDispersion::from_group_indices(
                self.pump.center_nm,
                *group_indices,
                *mismatch_offset,
            )?),
            DispersionConfig::Tabulated { table } => {
                DispersionModel::Tabulated(TabulatedDispersion::from_csv_file(self.resolve(table))?)
            }
        })
    }

    /// Spectrum on the per-pixel grid of the configured map.
    pub fn spectrum(&self, kind: SpectrumKind) -> Result<JointSpectrum> {
        let grid = self.map.pixel_grid()?;
        let dep = joint_spectral_intensity(&grid, &self.pump, &self.crystal, &self.dispersion_model()?)?;
        match kind {
            SpectrumKind::Dependent => Ok(dep),
            SpectrumKind::Independent => {
                let (ps, pi) = marginals(&dep)?;
                separable_joint(&ps, &pi)
            }
            SpectrumKind::Filtered => {
                let g = scissors_matrix(&self.filters.signal, &self.filters.idler, &grid)?;
                apply_scissors(&dep, &g)
            }
        }
    }

    /// Segmentation of the configured boxes.
    pub fn calibration(&self) -> Result<Calibration> {
        Calibration::from_map(
            &self.map,
            self.segmentation.width_px,
            self.camera.width,
            self.camera.height,
        )
    }

    pub fn simulator(&self, kind: SpectrumKind) -> Result<FrameSimulator> {
        FrameSimulator::new(&self.spectrum(kind)?, self.source, self.camera, self.map)
    }
}
