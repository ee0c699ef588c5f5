//! Response and thermal correlation of a Cattaneo (telegrapher) medium.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::CattaneoParams;

/// Dynamical susceptibility of the medium,
/// χ(k, ω) = −χ0 (Γ_k² − iω/τ_s)/(ω² − Γ_k² + iω/τ̃).
///
/// This is the physical susceptibility φ = χV: its static limit is +χ0 and
/// Im χ · ω ≥ 0.
pub fn cattaneo_chi(k: f64, omega: f64, p: &CattaneoParams) -> Complex64 {
    let g2 = p.gamma_k_sq(k);
    let num = Complex64::new(g2, -omega * p.gamma_s());
    let den = Complex64::new(omega * omega - g2, omega * p.inv_tau_tilde());
    -p.chi0 * num / den
}

/// The same response in the sign convention of the qubit kernels, where a
/// single mode contributes −θ(τ) sin(ωτ): equal to −[`cattaneo_chi`], so
/// Im χ · sign(ω) ≤ 0.
pub fn field_response(k: f64, omega: f64, p: &CattaneoParams) -> Complex64 {
    -cattaneo_chi(k, omega, p)
}

/// Im of [`field_response`] divided by ω, which stays finite at ω = 0:
/// −χ0 (γ_D Γ_k² + γ_s ω²)/((ω² − Γ_k²)² + γ²ω²).
pub fn field_response_im_over_omega(k: f64, omega: f64, p: &CattaneoParams) -> f64 {
    let g2 = p.gamma_k_sq(k);
    let gamma = p.gamma();
    let w2 = omega * omega;
    let den = (w2 - g2) * (w2 - g2) + gamma * gamma * w2;
    -p.chi0 * (p.gamma_d() * g2 + p.gamma_s() * w2) / den
}

/// Statistics used to turn a response into a symmetric correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FdtMode {
    /// C = −Im χ coth(ω/2T).
    #[default]
    Full,
    /// C = −Im χ · 2T/ω, the high-temperature limit.
    Classical,
}

/// y coth y, equal to 1 at y = 0.
fn y_coth_y(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 + y * y / 3.0
    } else {
        y / y.tanh()
    }
}

/// Fluctuation–dissipation correlation from Im χ(ω)/ω.
///
/// Taking the ratio rather than Im χ itself makes ω = 0 an ordinary point:
/// there both modes give −2T lim Im χ/ω.
pub fn fdt_c(chi_im_over_omega: f64, omega: f64, temperature: f64, mode: FdtMode) -> f64 {
    let classical = -chi_im_over_omega * 2.0 * temperature;
    match mode {
        FdtMode::Classical => classical,
        FdtMode::Full => classical * y_coth_y(0.5 * omega / temperature),
    }
}

/// Symmetric correlation C(k, ω) of the medium at its own temperature.
pub fn cattaneo_c(k: f64, omega: f64, p: &CattaneoParams, mode: FdtMode) -> f64 {
    fdt_c(field_response_im_over_omega(k, omega, p), omega, p.temperature, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn static_limit_is_chi0_without_relaxation() {
        let p = CattaneoParams {
            tau_s: 1e12,
            chi0: 2.5,
            ..CattaneoParams::default()
        };
        for k in [0.0, 0.3, 7.0] {
            assert!((cattaneo_chi(k, 0.0, &p) - Complex64::new(2.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn high_frequency_falloff() {
        let p = CattaneoParams::default();
        let k = 2.0;
        let g2 = p.gamma_k_sq(k);
        for w in [1e4, 1e5, 1e6] {
            let v = cattaneo_chi(k, w, &p);
            assert!(v.norm() < 2.0 * p.chi0 * (g2 + w * p.gamma_s()) / (w * w));
        }
        assert!(cattaneo_chi(k, 1e6, &p).norm() < cattaneo_chi(k, 1e4, &p).norm());
    }

    #[test]
    fn classical_correlation_matches_direct_spectral_form() {
        let p = CattaneoParams {
            c: 1.3,
            tau_d: 0.7,
            tau_s: 20.0,
            chi0: 0.9,
            temperature: 2.2,
            ..CattaneoParams::default()
        };
        let (gd, gs) = (1.0 / p.tau_d, 1.0 / p.tau_s);
        let gamma = gd + gs;
        for k in [0.0, 0.4, 3.0] {
            let g2 = p.c * p.c * k * k + gd * gs;
            for w in [-5.0, -0.3, 0.0, 0.2, 1.1, 40.0] {
                let want = 2.0 * p.chi0 * p.temperature * (gd * g2 + gs * w * w)
                    / ((w * w - g2) * (w * w - g2) + gamma * gamma * w * w);
                let got = cattaneo_c(k, w, &p, FdtMode::Classical);
                assert!((got / want - 1.0).abs() < 1e-13, "k={k} w={w}");
                if w != 0.0 {
                    let ratio = field_response(k, w, &p).im / w;
                    assert!((ratio / field_response_im_over_omega(k, w, &p) - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fdt_reference_values() {
        // ω = 2T multiplies the classical value by 1·coth(1).
        let full = fdt_c(-1.0, 2.0, 1.0, FdtMode::Full);
        let classical = fdt_c(-1.0, 2.0, 1.0, FdtMode::Classical);
        assert!((full / classical - 1.0 / 1f64.tanh()).abs() < 1e-15);
        assert!((full / classical - 1.3130352854993312).abs() < 1e-13);
        assert_eq!(fdt_c(-0.5, 0.0, 3.0, FdtMode::Full), 3.0);
        assert_eq!(fdt_c(-0.5, 0.0, 3.0, FdtMode::Classical), 3.0);
    }

    proptest! {
        #[test]
        fn field_response_is_dissipative(k in 0.0f64..60.0, w in -100.0f64..100.0) {
            let p = CattaneoParams::default();
            let v = field_response(k, w, &p);
            prop_assert!(v.im * w.signum() <= 0.0);
            prop_assert!(cattaneo_chi(k, w, &p).im * w.signum() >= 0.0);
        }

        #[test]
        fn spectral_function_is_non_negative(k in 0.0f64..60.0, w in -1e3f64..1e3,
                                             td in 0.01f64..10.0, ts in 1.0f64..1e4) {
            let p = CattaneoParams { tau_d: td, tau_s: ts, ..CattaneoParams::default() };
            prop_assert!(cattaneo_c(k, w, &p, FdtMode::Classical) >= 0.0);
            prop_assert!(cattaneo_c(k, w, &p, FdtMode::Full) >= 0.0);
        }

        #[test]
        fn classical_limit_of_full_statistics(ratio in 1e-7f64..1e-3, t in 0.1f64..10.0) {
            let w = ratio * t;
            let full = fdt_c(-1.0, w, t, FdtMode::Full);
            let classical = fdt_c(-1.0, w, t, FdtMode::Classical);
            prop_assert!((full / classical - 1.0).abs() < ratio);
            prop_assert!(full >= classical);
        }
    }
}
