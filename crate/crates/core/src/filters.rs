//! Frequency filter functions of the Ramsey and spin-echo protocols.
//!
//! All three are written as t² times a function of x = ωt built from sinc
//! factors, which removes the 1/ω² pole and keeps full precision at small ωt.

use num_complex::Complex64;

use crate::model::ProtocolKind;
use crate::numerics::special::sinc;

/// A filter value; Ramsey and global-echo filters are real, the local-echo
/// filter is purely imaginary.
pub type FilterValue = Complex64;

/// 𝒲_p(ω, t).
///
/// Ramsey 4 sin²(ωt/2)/ω², local echo 8i sin(ωt/2) sin²(ωt/4)/ω², global
/// echo 16 sin⁴(ωt/4)/ω². At ω = 0 the limits t², 0 and 0 are returned.
pub fn eval_filter(kind: ProtocolKind, omega: f64, t: f64) -> FilterValue {
    let x = omega * t;
    let t2 = t * t;
    match kind {
        ProtocolKind::Ramsey => Complex64::new(t2 * sinc(0.5 * x).powi(2), 0.0),
        ProtocolKind::LocalSpinEcho => Complex64::new(0.0, t2 * 0.25 * x * sinc(0.5 * x) * sinc(0.25 * x).powi(2)),
        ProtocolKind::GlobalSpinEcho => Complex64::new(t2 * x * x / 16.0 * sinc(0.25 * x).powi(4), 0.0),
    }
}

/// 𝒲_Ram − 𝒲_GSE + 2𝒲_LSE in closed form.
///
/// Equals (4/ω²)(2e^{iωt/2} − e^{iωt} − 1) = (16/ω²) sin²(ωt/4) e^{iωt/2}.
/// The pole cancels and the ω → 0 limit is t².
pub fn filter_combination(omega: f64, t: f64) -> FilterValue {
    let x = omega * t;
    Complex64::from_polar(t * t * sinc(0.25 * x).powi(2), 0.5 * x)
}

/// Power of ω with which each filter vanishes (or stays flat) at low
/// frequency.
pub fn low_frequency_exponent(kind: ProtocolKind) -> u32 {
    match kind {
        ProtocolKind::Ramsey => 0,
        ProtocolKind::LocalSpinEcho => 1,
        ProtocolKind::GlobalSpinEcho => 2,
    }
}
