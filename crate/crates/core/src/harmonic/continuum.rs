//! Continuum-limit X12, N12 and N1 of an isotropic harmonic bath.
//!
//! Mode sums become ∫ d^Dk/(2π)^D, reduced to a radial integral over
//! [k_min, k_max] with the angular kernel of the dimension.

use serde::Serialize;

use crate::error::{Error, IssueKind, Result, Validate, Validator};
use crate::harmonic::modes::{mode_noise, mode_response};
use crate::model::{
    check_gapless_dimension, validate_harmonic, DispersionSpec, MomentumGrid, OccupationSpec, ProbeGeometry,
    ProtocolKind,
};
use crate::numerics::angular::{angular_kernel, radial_measure};
use crate::numerics::quad::{integrate_adaptive, QuadOptions, ToleranceNorm};

/// Requested accuracy of continuum integrals.
///
/// `rel_tol` is measured against ∫|integrand|, so values that cancel to
/// nearly zero (far outside a light cone) still converge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_panels: 400_000,
        }
    }
}

impl Accuracy {
    pub fn with_rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Shared radial integration: ∫ dk k^{D−1}/(2π)^D A_D(kr) g(k, ω_k).
fn radial_integral<G: Fn(f64, f64) -> f64>(
    disp: &DispersionSpec,
    dim: u8,
    r: f64,
    grid: &MomentumGrid,
    acc: &Accuracy,
    time_rate: f64,
    extra_breaks: &[f64],
    g: G,
) -> Result<f64> {
    angular_kernel(dim, 0.0)?;
    let (lo, hi) = disp.domain();
    if grid.k_min < lo || grid.k_max > hi {
        return Err(Error::Domain(format!(
            "momentum grid [{}, {}] exceeds dispersion domain [{lo}, {hi}]",
            grid.k_min, grid.k_max
        )));
    }
    let mut breakpoints = grid.points();
    breakpoints.extend_from_slice(extra_breaks);
    if matches!(disp, DispersionSpec::Gapless { .. }) {
        // Resolve power-law behaviour near k = 0.
        let mut k = grid.k_max;
        while k > grid.k_min.max(grid.k_max * 1e-10) {
            k *= 0.3;
            breakpoints.push(k);
        }
    }
    let v = disp.max_group_velocity(grid.k_max);
    let opts = QuadOptions {
        rel_tol: acc.rel_tol,
        abs_tol: acc.abs_tol,
        norm: ToleranceNorm::Magnitude,
        max_panels: acc.max_panels,
        breakpoints,
        frequency_hint: Some(r + v * time_rate),
    };
    let f = |k: f64| {
        let w = disp.omega_in_domain(k);
        let a = angular_kernel(dim, k * r).unwrap_or(0.0);
        radial_measure(dim, k) * a * g(k, w)
    };
    integrate_adaptive(f, grid.k_min, grid.k_max, &opts).require()
}

fn check_inputs(disp: &DispersionSpec, geom: &ProbeGeometry, grid: &MomentumGrid) -> Result<()> {
    let mut v = Validator::new();
    disp.check("dispersion", &mut v);
    geom.check("geometry", &mut v);
    grid.check("grid", &mut v);
    check_gapless_dimension(disp, geom.dim, &mut v);
    v.finish().map_err(Error::Invalid)
}

/// Integrated response X12(r, t) for the given protocol.
pub fn harmonic_x12(
    disp: &DispersionSpec,
    geom: &ProbeGeometry,
    t: f64,
    grid: &MomentumGrid,
    protocol: ProtocolKind,
    acc: &Accuracy,
) -> Result<f64> {
    check_inputs(disp, geom, grid)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let value = radial_integral(disp, geom.dim, geom.r, grid, acc, t, &[], |_, w| {
        mode_response(protocol, w, t)
    })?;
    Ok(geom.coupling_product() * value)
}

/// Correlated dephasing N12(r, t) after a Ramsey sequence.
pub fn harmonic_n12(
    disp: &DispersionSpec,
    occ: &OccupationSpec,
    geom: &ProbeGeometry,
    t: f64,
    grid: &MomentumGrid,
    acc: &Accuracy,
) -> Result<f64> {
    validate_harmonic(disp, occ, geom, grid)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let value = radial_integral(disp, geom.dim, geom.r, grid, acc, t, &occ.features(), |k, w| {
        mode_noise(w, occ.occupation(k, w), t)
    })?;
    Ok(geom.coupling_product() * value)
}

/// Local noise N1(t) of a single qubit with coupling `lambda`.
pub fn harmonic_n1(
    disp: &DispersionSpec,
    occ: &OccupationSpec,
    dim: u8,
    lambda: f64,
    t: f64,
    grid: &MomentumGrid,
    acc: &Accuracy,
) -> Result<f64> {
    let geom = ProbeGeometry {
        dim,
        r: 0.0,
        lambda1: lambda,
        lambda2: lambda,
        delta: 0.0,
    };
    Ok(0.5 * harmonic_n12(disp, occ, &geom, t, grid, acc)?)
}

/// Long-time behaviour of a gapped bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongTimeLimits {
    /// lim X12/t.
    pub x12_slope: f64,
    /// Time average of N12.
    pub n12_plateau: f64,
}

/// Asymptotic X12 slope and N12 plateau; requires a gapped spectrum.
pub fn harmonic_longtime(
    disp: &DispersionSpec,
    occ: &OccupationSpec,
    geom: &ProbeGeometry,
    grid: &MomentumGrid,
    acc: &Accuracy,
) -> Result<LongTimeLimits> {
    validate_harmonic(disp, occ, geom, grid)?;
    if !(disp.gap() > 0.0) {
        let mut v = Validator::new();
        v.push(
            "dispersion",
            IssueKind::DivergentRegime,
            "long-time limits need a gapped spectrum",
        );
        return Err(Error::Invalid(v.finish().unwrap_err()));
    }
    let lam = geom.coupling_product();
    let slope = radial_integral(disp, geom.dim, geom.r, grid, acc, 0.0, &[], |_, w| 1.0 / w)?;
    let plateau = radial_integral(disp, geom.dim, geom.r, grid, acc, 0.0, &occ.features(), |k, w| {
        (1.0 + 2.0 * occ.occupation(k, w)) / (w * w)
    })?;
    Ok(LongTimeLimits {
        x12_slope: -0.5 * lam * slope,
        n12_plateau: lam * plateau,
    })
}
