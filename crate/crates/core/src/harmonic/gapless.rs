//! Scaling function of a gapless bath with ω = α|k|^z.
//!
//! In the classical regime n + ½ ≈ T/ω, rescaling k' = k (αt)^{1/z} gives
//! N12 = λ1λ2 T t^{3−D/z} α^{−D/z} f(r^z/(αt)) with
//! f(u) = 4 ∫ dk' k'^{D−1}/(2π)^D A_D(k' u^{1/z}) sin²(k'^z/2)/k'^{3z}.

use crate::error::{Error, Result};
use crate::harmonic::continuum::Accuracy;
use crate::numerics::angular::{angular_kernel, radial_measure};
use crate::numerics::quad::{integrate_adaptive, QuadOptions, ToleranceNorm};

/// Largest value of k'^z integrated explicitly before switching to the
/// averaged tail.
const MAX_PHASE: f64 = 2e4;

/// The scaling function f(u).
///
/// Finite only for z < D < 3z: D ≤ z diverges in the infrared and D ≥ 3z in
/// the ultraviolet. Beyond a matching point K the oscillating factor
/// sin²(k'^z/2) is replaced by its mean ½; the neglected oscillating part
/// is bounded by 2 A_max K^{D−4z}/(z (2π)^D), and K is chosen to push that
/// bound below the tolerance.
pub fn gapless_scaling_f(dim: u8, z: f64, u: f64, acc: &Accuracy) -> Result<f64> {
    let d = dim as f64;
    angular_kernel(dim, 0.0)?;
    if !(z >= 1.0) {
        return Err(Error::Domain(format!("dynamical exponent must be >= 1, got {z}")));
    }
    if d <= z {
        return Err(Error::DivergentRegime(format!(
            "D = {dim} <= z = {z}: infrared divergent scaling integral"
        )));
    }
    if d >= 3.0 * z {
        return Err(Error::DivergentRegime(format!(
            "D = {dim} >= 3z = {}: ultraviolet divergent scaling integral",
            3.0 * z
        )));
    }
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("u must be >= 0, got {u}")));
    }
    let q = u.powf(1.0 / z);
    let a_max = angular_kernel(dim, 0.0)?.abs();
    let full = |k: f64| {
        let s = (0.5 * k.powf(z)).sin();
        4.0 * radial_measure(dim, k) * angular_kernel(dim, k * q).unwrap_or(0.0) * s * s / k.powf(3.0 * z)
    };
    let mean = |k: f64| 2.0 * radial_measure(dim, k) * angular_kernel(dim, k * q).unwrap_or(0.0) / k.powf(3.0 * z);

    // Rough scale for the absolute tolerance: the u = 0 integrand below k' = 1.
    let scale = integrate_adaptive(
        |k: f64| 4.0 * radial_measure(dim, k) * a_max * (0.5 * k.powf(z)).sin().powi(2) / k.powf(3.0 * z),
        0.0,
        1.0,
        &QuadOptions::with_tol(1e-6, 0.0),
    )
    .value;
    let target = (acc.rel_tol * scale).max(acc.abs_tol);
    let bound = |k: f64| 2.0 * a_max * k.powf(d - 4.0 * z) / (z * (2.0 * std::f64::consts::PI).powi(dim as i32));
    let mut k_match = 4.0f64;
    while bound(k_match) > 0.1 * target && k_match.powf(z) < MAX_PHASE {
        k_match *= 1.25;
    }
    if bound(k_match) > target {
        return Err(Error::QuadratureNotConverged {
            value: f64::NAN,
            abs_error: bound(k_match),
            tolerance: target,
        });
    }

    let mut breakpoints: Vec<f64> = (1..=12).map(|j| 10f64.powi(-j)).collect();
    breakpoints.push(1.0);
    let opts = QuadOptions {
        rel_tol: acc.rel_tol,
        abs_tol: 0.1 * target,
        norm: ToleranceNorm::Magnitude,
        max_panels: acc.max_panels,
        breakpoints,
        frequency_hint: Some(z * k_match.powf(z - 1.0) + q),
    };
    let head = integrate_adaptive(full, 0.0, k_match, &opts).require()?;

    // Averaged tail on [K, K_end] plus an analytic bound beyond K_end.
    let mut k_end = 10.0 * k_match;
    let tail_bound = |k: f64| 2.0 * a_max * radial_measure(dim, 1.0) * k.powf(d - 3.0 * z) / (3.0 * z - d);
    while tail_bound(k_end) > 0.1 * target && k_end < 1e12 {
        k_end *= 10.0;
    }
    let tail_opts = QuadOptions {
        breakpoints: crate::numerics::fit::geomspace(k_match, k_end, 64),
        frequency_hint: if q > 0.0 { Some(q) } else { None },
        max_panels: acc.max_panels,
        ..opts
    };
    let tail = integrate_adaptive(mean, k_match, k_end, &tail_opts);
    if !tail.converged || tail_bound(k_end) > target {
        return Err(Error::QuadratureNotConverged {
            value: head + tail.value,
            abs_error: tail.abs_error_estimate + tail_bound(k_end),
            tolerance: target,
        });
    }
    Ok(head + tail.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values_three_dimensions_z_two() {
        // Values of the rescaled integral from an independent fine-grid
        // Gauss–Legendre evaluation.
        let acc = Accuracy::with_rel(1e-9);
        for (u, want) in [
            (0.1, 0.08275),
            (0.3, 0.07935),
            (1.0, 0.06959),
            (2.0, 0.05892),
            (5.0, 0.03905),
        ] {
            let got = gapless_scaling_f(3, 2.0, u, &acc).unwrap();
            assert!((got / want - 1.0).abs() < 2e-4, "f({u}) = {got}, want {want}");
        }
    }

    #[test]
    fn zero_argument_is_finite_and_large_argument_follows_infrared_asymptote() {
        // For u → ∞ only k' → 0 contributes, where sin²(k'²/2)/k'⁶ → 1/(4k'²),
        // leaving f(u) → 1/(4π√u) for D = 3, z = 2.
        let acc = Accuracy::with_rel(1e-8);
        let f0 = gapless_scaling_f(3, 2.0, 0.0, &acc).unwrap();
        assert!(f0.is_finite() && f0 > 0.0);
        for (u, tol) in [(400.0, 1e-4), (1600.0, 1e-6)] {
            let far = gapless_scaling_f(3, 2.0, u, &acc).unwrap();
            let asymptote = 1.0 / (4.0 * std::f64::consts::PI * f64::sqrt(u));
            assert!((far / asymptote - 1.0).abs() < tol, "f({u}) = {far}");
            assert!(far < f0);
        }
        let f0 = gapless_scaling_f(2, 1.5, 0.0, &acc).unwrap();
        assert!(f0.is_finite() && f0 > 0.0);
    }

    #[test]
    fn divergent_dimensions_are_refused() {
        let acc = Accuracy::default();
        assert!(matches!(
            gapless_scaling_f(1, 2.0, 1.0, &acc),
            Err(Error::DivergentRegime(_))
        ));
        assert!(matches!(
            gapless_scaling_f(2, 2.0, 1.0, &acc),
            Err(Error::DivergentRegime(_))
        ));
        assert!(matches!(
            gapless_scaling_f(3, 1.0, 1.0, &acc),
            Err(Error::DivergentRegime(_))
        ));
    }

    #[test]
    fn u_zero_matches_closed_form() {
        // At u = 0, D = 3, z = 2: f(0) = (16π/(2π)³) ∫₀^∞ sin²(k²/2)/k⁴ dk and
        // the integral equals √π/(3√2) via ∫₀^∞ x^{s−1} sin²x dx at s = −3/2.
        use std::f64::consts::PI;
        let want = 16.0 * PI / (2.0 * PI).powi(3) * PI.sqrt() / (3.0 * 2f64.sqrt());
        let got = gapless_scaling_f(3, 2.0, 0.0, &Accuracy::with_rel(1e-10)).unwrap();
        assert!((got / want - 1.0).abs() < 1e-8, "{got} vs {want}");
    }
}
