//! Cattaneo-response media: response and correlation functions, the
//! closed-form mode noise, its Hankel transform, the stationary profile and
//! dipole coupling to NV probes.

pub mod cattaneo;
pub mod dipole;
pub mod noise;

pub use cattaneo::{cattaneo_c, cattaneo_chi, fdt_c, field_response, field_response_im_over_omega, FdtMode};
pub use dipole::{
    dipole_kernel_fourier, dipole_kernel_fourier_numeric, dipole_kernel_real, nv_form_factor, nv_n12, nv_profile,
};
pub use noise::{
    critical_momentum, diffusive_mode_noise, diffusive_n1, diffusive_n12, diffusive_profile, mode_noise_by_frequency,
    stationary_profile, ModeNoiseValue,
};
