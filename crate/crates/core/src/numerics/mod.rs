//! Quadrature, special functions, angular kernels and the double-time
//! integral oracle.

pub mod angular;
pub mod fit;
pub mod oracle;
pub mod quad;
pub mod special;

pub use angular::{angular_kernel, radial_measure};
pub use oracle::{oracle_double_time_integral, EchoFlags, OracleResult};
pub use quad::{gauss_legendre, integrate_adaptive, QuadOptions, QuadratureResult, ToleranceNorm};
pub use special::{bessel_j0, bessel_k0};
