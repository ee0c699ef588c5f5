//! Magnetic dipole kernel linking a planar medium to a probe above it, and
//! the momentum filter it imposes on the NV signal.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::continuum::Accuracy;
use crate::model::NvParams;
use crate::numerics::quad::{integrate_adaptive, QuadOptions};

use super::noise::{diffusive_n12, diffusive_profile};

pub type Matrix3 = [[f64; 3]; 3];
pub type ComplexMatrix3 = [[Complex64; 3]; 3];

/// K_αβ(r) = pref/(4π|r|⁵) (3 r_α r_β − δ_αβ |r|²), where `pref` stands for
/// the product of the dipole constants.
pub fn dipole_kernel_real(r: [f64; 3], pref: f64) -> Result<Matrix3> {
    let r2: f64 = r.iter().map(|x| x * x).sum();
    if !(r2 > 0.0) {
        return Err(Error::Domain("dipole kernel is singular at r = 0".into()));
    }
    let scale = pref / (4.0 * std::f64::consts::PI * r2 * r2 * r2.sqrt());
    let mut k = [[0.0; 3]; 3];
    for (a, row) in k.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let delta = if a == b { r2 } else { 0.0 };
            *v = scale * (3.0 * (r[a] * r[b]) - delta);
        }
    }
    Ok(k)
}

/// In-plane Fourier transform ∫d²ρ e^{−iq·ρ} K(ρ, d) of [`dipole_kernel_real`]
/// at height d > 0.
///
/// Writing q̂ = q/|q| and E = ½ pref e^{−|q|d}, the entries are
/// K_ab = −E |q| q̂_a q̂_b, K_az = K_za = −iE q_a and K_zz = +E |q|
/// for in-plane indices a, b. The zero matrix is returned at q = 0.
pub fn dipole_kernel_fourier(q: [f64; 2], d: f64, pref: f64) -> ComplexMatrix3 {
    let zero = Complex64::new(0.0, 0.0);
    let mut k = [[zero; 3]; 3];
    let qn = q[0].hypot(q[1]);
    if qn == 0.0 {
        return k;
    }
    let e = 0.5 * pref * (-qn * d).exp();
    for a in 0..2 {
        for b in 0..2 {
            k[a][b] = Complex64::new(-e * q[a] * q[b] / qn, 0.0);
        }
        k[a][2] = Complex64::new(0.0, -e * q[a]);
        k[2][a] = k[a][2];
    }
    k[2][2] = Complex64::new(e * qn, 0.0);
    k
}

/// Momentum filter of the NV signal, prefactor · k² e^{−2dk}.
pub fn nv_form_factor(k: f64, nv: &NvParams) -> f64 {
    nv.kernel_prefactor * k * k * (-2.0 * nv.d * k).exp()
}

/// The form factor in units of χ0. The diffusive noise already carries χ0,
/// so the NV signal uses `kernel_prefactor` in its place.
fn relative_form_factor(nv: &NvParams) -> impl Fn(f64) -> f64 + '_ {
    move |k| nv_form_factor(k, nv) / nv.base.chi0
}

/// Correlated NV dephasing N12(r, t) per unit coupling.
pub fn nv_n12(r: f64, t: f64, nv: &NvParams, acc: &Accuracy) -> Result<f64> {
    diffusive_n12(r, t, &nv.base, relative_form_factor(nv), acc)
}

/// NV profile f(r, t) = N12/N1.
pub fn nv_profile(r: f64, t: f64, nv: &NvParams, acc: &Accuracy) -> Result<f64> {
    diffusive_profile(r, t, &nv.base, relative_form_factor(nv), acc)
}

/// Reference value of one entry of [`dipole_kernel_fourier`] (unit
/// prefactor) by nested adaptive quadrature of [`dipole_kernel_real`] over
/// the square of half-width 80d. The kernel falls off as 1/ρ³, so the
/// truncated region changes entries at |q|d ≥ 0.5 by well under 1%.
pub fn dipole_kernel_fourier_numeric(a: usize, b: usize, q: [f64; 2], d: f64) -> Complex64 {
    let half_width = 80.0 * d;
    let inner_opts = QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-13,
        breakpoints: vec![-5.0 * d, -d, 0.0, d, 5.0 * d],
        frequency_hint: Some(q[1].abs().max(0.2 / d)),
        max_panels: 100_000,
        ..QuadOptions::default()
    };
    let outer_opts = QuadOptions {
        frequency_hint: Some(q[0].abs().max(0.2 / d)),
        ..inner_opts.clone()
    };
    let part = |re: bool| {
        integrate_adaptive(
            |x: f64| {
                integrate_adaptive(
                    |y: f64| {
                        let k = dipole_kernel_real([x, y, d], 1.0).map_or(0.0, |m| m[a][b]);
                        let phase = -(q[0] * x + q[1] * y);
                        k * if re { phase.cos() } else { phase.sin() }
                    },
                    -half_width,
                    half_width,
                    &inner_opts,
                )
                .value
            },
            -half_width,
            half_width,
            &outer_opts,
        )
        .value
    };
    Complex64::new(part(true), part(false))
}
