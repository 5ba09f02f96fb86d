//! Joint spectral intensity models on a discrete wavelength grid.

mod dispersion;
mod filter;
mod grid;
mod joint;
mod model;

pub use dispersion::{
    Beam, Dispersion, DispersionModel, GroupIndices, LinearDispersion, LinearWavenumber,
    TabulatedDispersion,
};
pub use filter::{FilterShape, FilterSpec};
pub use grid::{
    bandwidth_nm_to_omega, omega_to_wavelength, wavelength_to_omega, FrequencyGrid,
    SPEED_OF_LIGHT, SPEED_OF_LIGHT_MM,
};
pub(crate) use grid::cell_edges;
pub use joint::{JointSpectrum, SpectralMarginal, NORMALIZATION_TOLERANCE};
pub use model::{
    apply_scissors, joint_spectral_intensity, marginals, mismatch_phase, noise_matrix,
    phase_matching, pump_envelope, scissors_matrix, separable_joint, separable_joint_on,
    CrystalSpec, PhaseMatchingType, PumpSpec,
};
