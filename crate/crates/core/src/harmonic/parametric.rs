//! Mode populations under a parametric pair-creation drive.
//!
//! A drive of strength δ at frequency Ω detuned by ε = Ω − 2ω_k mixes a_k
//! and a†_{−k} with rate λ = ½√(δ² − ε²). Modes with |ε| < δ grow
//! exponentially; the others oscillate with frequency |λ|.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{bose, DispersionSpec, OccupationSpec};

/// Drive bookkeeping for one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParametricDriveState {
    /// ε = Ω − 2ω_k.
    pub epsilon: f64,
    /// λ = ½√(δ² − ε²); purely imaginary off resonance.
    pub lambda_re: f64,
    pub lambda_im: f64,
    /// Thermal occupation before the drive.
    pub n_thermal: f64,
    /// ⟨a†a⟩ after the drive.
    pub n: f64,
    /// |⟨a_k a_{−k}⟩| after the drive.
    pub m: f64,
}

impl ParametricDriveState {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.lambda_re, self.lambda_im)
    }
}

/// cosh(λt) and sinh(λt)/λ for λ² real of either sign.
fn hyperbolic_pair(lambda_sq: f64, t: f64) -> (f64, f64) {
    if lambda_sq > 0.0 {
        let l = lambda_sq.sqrt();
        let x = l * t;
        let s = if x.abs() < 1e-4 {
            t * (1.0 + x * x / 6.0)
        } else {
            x.sinh() / l
        };
        (x.cosh(), s)
    } else if lambda_sq < 0.0 {
        let l = (-lambda_sq).sqrt();
        let x = l * t;
        (x.cos(), t * crate::numerics::special::sinc(x))
    } else {
        (1.0, t)
    }
}

/// Populations of a mode with energy `omega` after the drive in `occ`.
///
/// n = n_th cosh²(λt) + ((δ−ε)/(δ+ε))(n_th+1) sinh²(λt), evaluated as
/// n_th C² + ¼(δ−ε)²(n_th+1) S² with C = cosh λt and S = sinh(λt)/λ. The
/// two forms agree wherever δ + ε ≠ 0, and the second has no pole there.
/// The anomalous magnitude is m = |δ−ε| (n_th+½) |sinh(2λt)/(2λ)|.
pub fn parametric_state(occ: &OccupationSpec, omega: f64) -> Result<ParametricDriveState> {
    let OccupationSpec::ParametricEvolved {
        temperature,
        delta,
        drive_frequency,
        t_drive,
    } = *occ
    else {
        return Err(Error::Config("parametric_state needs a parametric occupation".into()));
    };
    let epsilon = drive_frequency - 2.0 * omega;
    let lambda_sq = 0.25 * (delta * delta - epsilon * epsilon);
    let n_th = bose(omega, temperature);
    let (c, s) = hyperbolic_pair(lambda_sq, t_drive);
    let (_, s2) = hyperbolic_pair(lambda_sq, 2.0 * t_drive);
    let dm = delta - epsilon;
    let n = n_th * c * c + 0.25 * dm * dm * (n_th + 1.0) * s * s;
    // sinh(2λt)/(2λ) = ½ · S evaluated at 2t.
    let m = dm.abs() * (n_th + 0.5) * (0.5 * s2).abs();
    let (lambda_re, lambda_im) = if lambda_sq >= 0.0 {
        (lambda_sq.sqrt(), 0.0)
    } else {
        (0.0, (-lambda_sq).sqrt())
    };
    Ok(ParametricDriveState {
        epsilon,
        lambda_re,
        lambda_im,
        n_thermal: n_th,
        n,
        m,
    })
}

/// [`parametric_state`] for the mode at |k| of a dispersion.
pub fn parametric_occupation(occ: &OccupationSpec, disp: &DispersionSpec, k: f64) -> Result<ParametricDriveState> {
    parametric_state(occ, disp.omega(k)?)
}
