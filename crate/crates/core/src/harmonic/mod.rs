//! Harmonic (bosonic) baths: per-mode kernels, continuum integrals,
//! gapless scaling and parametric-drive occupations.

pub mod continuum;
pub mod gapless;
pub mod modes;
pub mod parametric;

pub use continuum::{harmonic_longtime, harmonic_n1, harmonic_n12, harmonic_x12, Accuracy, LongTimeLimits};
pub use gapless::gapless_scaling_f;
pub use modes::{mode_c, mode_chi, mode_noise, mode_response, mode_sum_n12, mode_sum_x12, Mode};
pub use parametric::{parametric_occupation, parametric_state, ParametricDriveState};
