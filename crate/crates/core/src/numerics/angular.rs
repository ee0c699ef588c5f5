//! Angular reduction of e^{ik·r} for isotropic integrands in D dimensions.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::special::{bessel_j0, sinc};

/// Integral of e^{ik·r} over the directions of k at fixed |k||r| = `kr`.
///
/// D = 1: 2cos(kr); D = 2: 2π J0(kr); D = 3: 4π sin(kr)/(kr).
pub fn angular_kernel(dim: u8, kr: f64) -> Result<f64> {
    match dim {
        1 => Ok(2.0 * kr.cos()),
        2 => Ok(2.0 * PI * bessel_j0(kr)),
        3 => Ok(4.0 * PI * sinc(kr)),
        d => Err(Error::DimensionOutOfRange(format!("D = {d} is not in 1..=3"))),
    }
}

/// Radial measure k^{D−1}/(2π)^D that accompanies [`angular_kernel`].
pub fn radial_measure(dim: u8, k: f64) -> f64 {
    let d = dim as i32;
    k.powi(d - 1) / (2.0 * PI).powi(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_limits() {
        assert!((angular_kernel(3, 0.0).unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!((angular_kernel(3, 1e-9).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((angular_kernel(2, 0.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((angular_kernel(1, PI).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_other_dimensions() {
        assert!(angular_kernel(0, 1.0).is_err());
        assert!(angular_kernel(4, 1.0).is_err());
    }

    #[test]
    fn gaussian_transform_in_each_dimension() {
        // ∫ d^Dk/(2π)^D e^{−k²/2} e^{ik·r} = (2π)^{−D/2} e^{−r²/2}.
        use crate::numerics::quad::{integrate_adaptive, QuadOptions};
        let r = 1.3;
        for dim in 1..=3u8 {
            let f = |k: f64| radial_measure(dim, k) * (-0.5 * k * k).exp() * angular_kernel(dim, k * r).unwrap();
            let got = integrate_adaptive(f, 0.0, 40.0, &QuadOptions::with_tol(1e-12, 0.0)).value;
            let want = (2.0 * PI).powf(-(dim as f64) / 2.0) * (-0.5 * r * r).exp();
            assert!((got - want).abs() < 1e-12, "D = {dim}: {got} vs {want}");
        }
    }
}
