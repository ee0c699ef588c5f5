//! Single-mode response and noise kernels and their double time integrals.

use serde::{Deserialize, Serialize};

use crate::model::ProtocolKind;
use crate::numerics::special::{sin_minus_x, sinc};

/// Retarded response of one mode, −θ(τ) sin(ωτ).
pub fn mode_chi(omega: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        0.0
    } else {
        -(omega * tau).sin()
    }
}

/// Symmetric correlation of one mode, (n + ½) cos(ωτ).
pub fn mode_c(omega: f64, occupation: f64, tau: f64) -> f64 {
    (occupation + 0.5) * (omega * tau).cos()
}

/// ∫∫ over [0, τ]² of [`mode_chi`], equal to (sin ωτ − ωτ)/ω².
fn chi_square_integral(omega: f64, tau: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    sin_minus_x(omega * tau) / (omega * omega)
}

/// ½∫∫ f(t2) g(t1) χ(t2 − t1) over [0, t]² for each protocol.
///
/// With I(τ) the unsigned square integral and h = t/2, the four quadrants
/// combine to ½I(t) for Ramsey, −½(I(t) − 2I(h)) for the local echo and
/// ½(4I(h) − I(t)) for the global echo.
pub fn mode_response(protocol: ProtocolKind, omega: f64, t: f64) -> f64 {
    let full = chi_square_integral(omega, t);
    let half = chi_square_integral(omega, 0.5 * t);
    match protocol {
        ProtocolKind::Ramsey => 0.5 * full,
        ProtocolKind::LocalSpinEcho => -0.5 * (full - 2.0 * half),
        ProtocolKind::GlobalSpinEcho => 0.5 * (4.0 * half - full),
    }
}

/// ∫∫ over [0, t]² of [`mode_c`], equal to 4 sin²(ωt/2)(n + ½)/ω².
pub fn mode_noise(omega: f64, occupation: f64, t: f64) -> f64 {
    t * t * sinc(0.5 * omega * t).powi(2) * (occupation + 0.5)
}

/// One term of a discrete mode sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub omega: f64,
    pub occupation: f64,
    /// Spatial phase factor, e.g. cos(k·r)/V.
    pub weight: f64,
}

/// X12 of a finite mode set.
pub fn mode_sum_x12(modes: &[Mode], coupling: f64, t: f64, protocol: ProtocolKind) -> f64 {
    coupling
        * modes
            .iter()
            .map(|m| m.weight * mode_response(protocol, m.omega, t))
            .sum::<f64>()
}

/// N12 of a finite mode set (Ramsey).
pub fn mode_sum_n12(modes: &[Mode], coupling: f64, t: f64) -> f64 {
    coupling
        * modes
            .iter()
            .map(|m| m.weight * mode_noise(m.omega, m.occupation, t))
            .sum::<f64>()
}
