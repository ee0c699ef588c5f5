//! Shared domain types and their invariants.
//!
//! Every type here is plain data: build it, call [`Validate::validate`],
//! then share it freely between threads.

use serde::{Deserialize, Serialize};

use crate::error::{join, Error, IssueKind, Result, Validate, ValidationErrors, Validator};
use crate::numerics::oracle::EchoFlags;
use crate::numerics::special::EULER_GAMMA;

/// Pulse sequence applied to the probe pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Ramsey,
    LocalSpinEcho,
    GlobalSpinEcho,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [
        ProtocolKind::Ramsey,
        ProtocolKind::LocalSpinEcho,
        ProtocolKind::GlobalSpinEcho,
    ];

    /// Time arguments of the response kernel (t2, t1) that carry the echo
    /// sign. The local echo acts on the second qubit only.
    pub fn echo_flags(self) -> EchoFlags {
        match self {
            ProtocolKind::Ramsey => EchoFlags::default(),
            ProtocolKind::LocalSpinEcho => EchoFlags {
                fp_on_t1: false,
                fp_on_t2: true,
            },
            ProtocolKind::GlobalSpinEcho => EchoFlags {
                fp_on_t1: true,
                fp_on_t2: true,
            },
        }
    }
}

/// Echo sign sgn(t/2 − τ).
pub fn echo_sign(tau: f64, t: f64) -> f64 {
    let half = 0.5 * t;
    if tau < half {
        1.0
    } else if tau > half {
        -1.0
    } else {
        0.0
    }
}

/// Thermal Bose occupation 1/(e^{ω/T} − 1); zero at T = 0.
pub fn bose(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

/// Samples of ω(|k|) interpolated by a monotone piecewise cubic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDispersion {
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
}

impl TabulatedDispersion {
    fn secant(&self, i: usize) -> f64 {
        (self.omega[i + 1] - self.omega[i]) / (self.k[i + 1] - self.k[i])
    }

    /// Fritsch–Butland node slope; zero at local extrema.
    fn node_slope(&self, i: usize) -> f64 {
        let n = self.k.len();
        if n == 2 {
            return self.secant(0);
        }
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
            let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if s.signum() != d0.signum() {
                0.0
            } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                s
            }
        };
        if i == 0 {
            let h0 = self.k[1] - self.k[0];
            let h1 = self.k[2] - self.k[1];
            return end(h0, h1, self.secant(0), self.secant(1));
        }
        if i == n - 1 {
            let h0 = self.k[n - 1] - self.k[n - 2];
            let h1 = self.k[n - 2] - self.k[n - 3];
            return end(h0, h1, self.secant(n - 2), self.secant(n - 3));
        }
        let (d0, d1) = (self.secant(i - 1), self.secant(i));
        if d0 * d1 <= 0.0 {
            return 0.0;
        }
        let h0 = self.k[i] - self.k[i - 1];
        let h1 = self.k[i + 1] - self.k[i];
        let w1 = 2.0 * h1 + h0;
        let w2 = h1 + 2.0 * h0;
        (w1 + w2) / (w1 / d0 + w2 / d1)
    }

    fn eval(&self, k: f64) -> f64 {
        let n = self.k.len();
        let i = match self.k.partition_point(|&x| x <= k) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.k[i + 1] - self.k[i];
        let s = (k - self.k[i]) / h;
        let (y0, y1) = (self.omega[i], self.omega[i + 1]);
        let (m0, m1) = (self.node_slope(i) * h, self.node_slope(i + 1) * h);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }

    fn max_slope(&self) -> f64 {
        (0..self.k.len())
            .map(|i| self.node_slope(i).abs())
            .chain((0..self.k.len() - 1).map(|i| self.secant(i).abs()))
            .fold(0.0, f64::max)
    }
}

/// Bath mode energies ω(|k|).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DispersionSpec {
    /// ω = √(ω0² + c²k²).
    Gapped {
        omega0: f64,
        c: f64,
    },
    /// ω = α|k|^z.
    Gapless {
        alpha: f64,
        z: f64,
    },
    Tabulated(TabulatedDispersion),
}

impl DispersionSpec {
    /// Momentum range on which ω is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            DispersionSpec::Tabulated(t) => (t.k[0], t.k[t.k.len() - 1]),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// ω at |k|; tabulated dispersions refuse to extrapolate.
    pub fn omega(&self, k: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let k = k.abs();
        if k < lo || k > hi {
            return Err(Error::Domain(format!(
                "k = {k} outside the tabulated range [{lo}, {hi}]"
            )));
        }
        Ok(self.omega_in_domain(k))
    }

    /// ω at |k| for k already checked against [`Self::domain`].
    pub(crate) fn omega_in_domain(&self, k: f64) -> f64 {
        match self {
            DispersionSpec::Gapped { omega0, c } => omega0.hypot(c * k),
            DispersionSpec::Gapless { alpha, z } => alpha * k.powf(*z),
            DispersionSpec::Tabulated(t) => t.eval(k),
        }
    }

    /// Upper bound on |dω/dk| for k in [0, k_max].
    pub fn max_group_velocity(&self, k_max: f64) -> f64 {
        match self {
            DispersionSpec::Gapped { c, .. } => *c,
            DispersionSpec::Gapless { alpha, z } => alpha * z * k_max.powf(z - 1.0),
            DispersionSpec::Tabulated(t) => t.max_slope(),
        }
    }

    /// Smallest mode energy, zero for gapless baths.
    pub fn gap(&self) -> f64 {
        match self {
            DispersionSpec::Gapped { omega0, .. } => *omega0,
            DispersionSpec::Gapless { .. } => 0.0,
            DispersionSpec::Tabulated(t) => t.omega.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

impl Validate for DispersionSpec {
    fn check(&self, path: &str, v: &mut Validator) {
        match self {
            DispersionSpec::Gapped { omega0, c } => {
                v.positive(&join(path, "omega0"), *omega0);
                v.positive(&join(path, "c"), *c);
            }
            DispersionSpec::Gapless { alpha, z } => {
                v.positive(&join(path, "alpha"), *alpha);
                if !(z.is_finite() && *z >= 1.0) {
                    v.push(
                        &join(path, "z"),
                        IssueKind::InvalidValue,
                        format!("must be >= 1, got {z}"),
                    );
                }
            }
            DispersionSpec::Tabulated(t) => {
                if t.k.len() != t.omega.len() || t.k.len() < 2 {
                    v.push(
                        &join(path, "k"),
                        IssueKind::InvalidValue,
                        "needs at least two (k, omega) samples of equal length",
                    );
                    return;
                }
                for (i, (&k, &w)) in t.k.iter().zip(&t.omega).enumerate() {
                    v.non_negative(&format!("{}[{i}]", join(path, "k")), k);
                    v.non_negative(&format!("{}[{i}]", join(path, "omega")), w);
                }
                if t.k.windows(2).any(|w| w[1] <= w[0]) {
                    v.push(&join(path, "k"), IssueKind::InvalidValue, "must be strictly increasing");
                }
            }
        }
    }
}

/// Mode populations n_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OccupationSpec {
    Thermal {
        temperature: f64,
    },
    /// n_th + A exp(−(|k| − k_dr)²/σ_dr²).
    ThermalPlusGaussian {
        temperature: f64,
        amplitude: f64,
        k_dr: f64,
        sigma_dr: f64,
    },
    /// Thermal state evolved under a parametric pair-creation drive.
    ParametricEvolved {
        temperature: f64,
        delta: f64,
        drive_frequency: f64,
        t_drive: f64,
    },
}

impl OccupationSpec {
    pub fn temperature(&self) -> f64 {
        match self {
            OccupationSpec::Thermal { temperature }
            | OccupationSpec::ThermalPlusGaussian { temperature, .. }
            | OccupationSpec::ParametricEvolved { temperature, .. } => *temperature,
        }
    }

    /// n_k for a mode at |k| with energy ω.
    pub fn occupation(&self, k: f64, omega: f64) -> f64 {
        match *self {
            OccupationSpec::Thermal { temperature } => bose(omega, temperature),
            OccupationSpec::ThermalPlusGaussian {
                temperature,
                amplitude,
                k_dr,
                sigma_dr,
            } => {
                let x = (k.abs() - k_dr) / sigma_dr;
                bose(omega, temperature) + amplitude * (-x * x).exp()
            }
            OccupationSpec::ParametricEvolved { .. } => crate::harmonic::parametric::parametric_state(self, omega)
                .map(|s| s.n)
                .unwrap_or(f64::NAN),
        }
    }

    /// Momenta where n_k has sharp features worth a quadrature breakpoint.
    pub fn features(&self) -> Vec<f64> {
        match *self {
            OccupationSpec::ThermalPlusGaussian { k_dr, sigma_dr, .. } => [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0]
                .iter()
                .map(|s| k_dr + s * sigma_dr)
                .filter(|k| *k > 0.0)
                .collect(),
            _ => Vec::new(),
        }
    }
}

impl Validate for OccupationSpec {
    fn check(&self, path: &str, v: &mut Validator) {
        v.non_negative(&join(path, "temperature"), self.temperature());
        match *self {
            OccupationSpec::Thermal { .. } => {}
            OccupationSpec::ThermalPlusGaussian {
                amplitude,
                k_dr,
                sigma_dr,
                ..
            } => {
                v.non_negative(&join(path, "amplitude"), amplitude);
                v.finite(&join(path, "k_dr"), k_dr);
                v.positive(&join(path, "sigma_dr"), sigma_dr);
            }
            OccupationSpec::ParametricEvolved {
                delta,
                drive_frequency,
                t_drive,
                ..
            } => {
                v.positive(&join(path, "delta"), delta);
                v.positive(&join(path, "drive_frequency"), drive_frequency);
                v.non_negative(&join(path, "t_drive"), t_drive);
            }
        }
    }
}

/// Cattaneo (telegrapher) response parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CattaneoParams {
    pub c: f64,
    pub tau_d: f64,
    pub tau_s: f64,
    pub chi0: f64,
    pub temperature: f64,
    /// UV momentum cutoff Λ.
    pub cutoff: f64,
    /// Microscopic length a.
    pub a: f64,
}

impl CattaneoParams {
    /// Real-space length equivalent to a sharp momentum cutoff: with this
    /// choice the local noise of the cutoff integral and the stationary
    /// K0 profile share the same normalization, ∫₀^Λ k dk/(k² + m²) ≈
    /// K0(a m) for m ≪ Λ.
    pub fn matched_length(cutoff: f64) -> f64 {
        2.0 * (-EULER_GAMMA).exp() / cutoff
    }

    pub fn gamma_d(&self) -> f64 {
        1.0 / self.tau_d
    }
    pub fn gamma_s(&self) -> f64 {
        1.0 / self.tau_s
    }
    /// Total damping γ = γ_D + γ_s.
    pub fn gamma(&self) -> f64 {
        self.gamma_d() + self.gamma_s()
    }
    /// 1/τ̃ = 1/τ_D + 1/τ_s.
    pub fn inv_tau_tilde(&self) -> f64 {
        1.0 / self.tau_d + 1.0 / self.tau_s
    }
    /// Γ_k² = c²k² + γ_D γ_s.
    pub fn gamma_k_sq(&self, k: f64) -> f64 {
        self.c * self.c * k * k + self.gamma_d() * self.gamma_s()
    }
    /// D = c² τ_D.
    pub fn diffusion_constant(&self) -> f64 {
        self.c * self.c * self.tau_d
    }
    /// l_s = √(D τ_s).
    pub fn diffusion_length(&self) -> f64 {
        (self.diffusion_constant() * self.tau_s).sqrt()
    }
}

impl Default for CattaneoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tau_d: 1.0,
            tau_s: 100.0,
            chi0: 1.0,
            temperature: 1.0,
            cutoff: 50.0,
            a: Self::matched_length(50.0),
        }
    }
}

impl Validate for CattaneoParams {
    fn check(&self, path: &str, v: &mut Validator) {
        for (name, value) in [
            ("c", self.c),
            ("tau_d", self.tau_d),
            ("tau_s", self.tau_s),
            ("chi0", self.chi0),
            ("temperature", self.temperature),
            ("cutoff", self.cutoff),
            ("a", self.a),
        ] {
            v.positive(&join(path, name), value);
        }
    }
}

/// NV-centre probe above a diffusive film.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NvParams {
    pub base: CattaneoParams,
    /// Stand-off distance d between probe and surface.
    pub d: f64,
    /// Overall scalar in front of k² e^{−2dk}.
    pub kernel_prefactor: f64,
}

impl Default for NvParams {
    fn default() -> Self {
        let base = CattaneoParams::default();
        Self {
            base,
            d: 1.0,
            // Squared zz Fourier kernel with a unit dipole constant: (1/2)² χ0.
            kernel_prefactor: 0.25 * base.chi0,
        }
    }
}

impl Validate for NvParams {
    fn check(&self, path: &str, v: &mut Validator) {
        self.base.check(&join(path, "base"), v);
        v.positive(&join(path, "d"), self.d);
        v.positive(&join(path, "kernel_prefactor"), self.kernel_prefactor);
    }
}

/// Probe pair: dimension, separation, couplings and splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeGeometry {
    pub dim: u8,
    pub r: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Qubit splitting; only enters a global phase.
    pub delta: f64,
}

impl Default for ProbeGeometry {
    fn default() -> Self {
        Self {
            dim: 2,
            r: 0.0,
            lambda1: 1.0,
            lambda2: 1.0,
            delta: 0.0,
        }
    }
}

impl ProbeGeometry {
    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }
    pub fn coupling_product(&self) -> f64 {
        self.lambda1 * self.lambda2
    }
}

impl Validate for ProbeGeometry {
    fn check(&self, path: &str, v: &mut Validator) {
        if !(1..=3).contains(&self.dim) {
            v.push(
                &join(path, "dim"),
                IssueKind::DimensionOutOfRange,
                format!("must be 1, 2 or 3, got {}", self.dim),
            );
        }
        v.non_negative(&join(path, "r"), self.r);
        v.finite(&join(path, "lambda1"), self.lambda1);
        v.finite(&join(path, "lambda2"), self.lambda2);
        v.finite(&join(path, "delta"), self.delta);
    }
}

/// Point spacing of a [`MomentumGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Momentum integration range and its initial partition.
///
/// The points seed the adaptive quadrature; refinement proceeds from there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MomentumGrid {
    pub k_min: f64,
    /// UV cutoff Λ.
    pub k_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl Default for MomentumGrid {
    fn default() -> Self {
        Self {
            k_min: 0.0,
            k_max: 30.0,
            n_points: 64,
            spacing: Spacing::Linear,
        }
    }
}

impl MomentumGrid {
    pub fn new(k_min: f64, k_max: f64, n_points: usize, spacing: Spacing) -> Self {
        Self {
            k_min,
            k_max,
            n_points,
            spacing,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.n_points.max(2);
        match self.spacing {
            Spacing::Linear => crate::numerics::fit::linspace(self.k_min, self.k_max, n),
            Spacing::Log => crate::numerics::fit::geomspace(self.k_min, self.k_max, n),
        }
    }
}

impl Validate for MomentumGrid {
    fn check(&self, path: &str, v: &mut Validator) {
        v.non_negative(&join(path, "k_min"), self.k_min);
        v.positive(&join(path, "k_max"), self.k_max);
        if !(self.k_min < self.k_max) {
            v.push(
                &join(path, "k_min"),
                IssueKind::InvalidValue,
                "k_min must be below k_max",
            );
        }
        if self.n_points < 16 {
            v.push(
                &join(path, "n_points"),
                IssueKind::InvalidValue,
                format!("must be at least 16, got {}", self.n_points),
            );
        }
        if self.spacing == Spacing::Log && !(self.k_min > 0.0) {
            v.push(
                &join(path, "k_min"),
                IssueKind::NonPositiveParameter,
                "log spacing needs k_min > 0",
            );
        }
    }
}

/// Cross-field checks for a harmonic bath evaluated on a momentum grid.
///
/// Gapless baths with D < z diverge in the infrared at any temperature
/// above zero; D = z diverges logarithmically unless the grid stops short
/// of k = 0.
pub fn validate_harmonic(
    disp: &DispersionSpec,
    occ: &OccupationSpec,
    geom: &ProbeGeometry,
    grid: &MomentumGrid,
) -> Result<(), ValidationErrors> {
    let mut v = Validator::new();
    disp.check("dispersion", &mut v);
    occ.check("occupation", &mut v);
    geom.check("geometry", &mut v);
    grid.check("grid", &mut v);
    check_gapless_dimension(disp, geom.dim, &mut v);
    if let DispersionSpec::Gapless { z, .. } = disp {
        if (geom.dim as f64 - z).abs() == 0.0 && occ.temperature() > 0.0 && grid.k_min == 0.0 {
            v.push(
                "grid.k_min",
                IssueKind::DivergentRegime,
                "D = z at finite temperature diverges logarithmically; set k_min > 0",
            );
        }
    }
    if let DispersionSpec::Tabulated(t) = disp {
        if t.k.len() >= 2 && (grid.k_min < t.k[0] || grid.k_max > t.k[t.k.len() - 1]) {
            v.push(
                "grid",
                IssueKind::InvalidValue,
                "momentum grid extends beyond the tabulated dispersion",
            );
        }
    }
    v.finish()
}

/// Rejects gapless baths in fewer dimensions than the dynamical exponent.
pub fn check_gapless_dimension(disp: &DispersionSpec, dim: u8, v: &mut Validator) {
    if let DispersionSpec::Gapless { z, .. } = disp {
        if (dim as f64) < *z {
            v.push(
                "geometry.dim",
                IssueKind::DivergentRegime,
                format!("gapless bath with D = {dim} < z = {z} is infrared divergent"),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gapped_dispersion_is_valid() {
        let d = DispersionSpec::Gapped { omega0: 1.0, c: 1.0 };
        assert!(d.validate().is_ok());
        assert_eq!(d.omega(0.0).unwrap(), 1.0);
    }

    #[test]
    fn gapless_below_dynamical_exponent_diverges() {
        let d = DispersionSpec::Gapless { alpha: 1.0, z: 2.0 };
        let geom = ProbeGeometry {
            dim: 1,
            ..Default::default()
        };
        let err = validate_harmonic(
            &d,
            &OccupationSpec::Thermal { temperature: 1.0 },
            &geom,
            &MomentumGrid::default(),
        )
        .unwrap_err();
        assert!(err.has(IssueKind::DivergentRegime));
        assert_eq!(err.0[0].path, "geometry.dim");
    }

    #[test]
    fn zero_crossover_time_is_rejected() {
        let p = CattaneoParams {
            tau_d: 0.0,
            ..Default::default()
        };
        let err = p.validate().unwrap_err();
        assert!(err.has(IssueKind::NonPositiveParameter));
        assert_eq!(err.0[0].path, "tau_d");
    }

    #[test]
    fn every_violation_is_reported() {
        let p = CattaneoParams {
            tau_d: 0.0,
            c: -1.0,
            chi0: f64::NAN,
            ..Default::default()
        };
        let err = p.validate().unwrap_err();
        let paths: Vec<&str> = err.0.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, ["c", "tau_d", "chi0"]);
        let nv = NvParams {
            base: p,
            d: 0.0,
            ..Default::default()
        };
        let err = nv.validate().unwrap_err();
        assert!(err.0.iter().any(|i| i.path == "base.tau_d"));
        assert!(err.0.iter().any(|i| i.path == "d"));
    }

    #[test]
    fn geometry_dimension_range() {
        let g = ProbeGeometry {
            dim: 4,
            ..Default::default()
        };
        assert!(g.validate().unwrap_err().has(IssueKind::DimensionOutOfRange));
    }

    #[test]
    fn grid_invariants() {
        assert!(MomentumGrid::new(0.0, 1.0, 15, Spacing::Linear).validate().is_err());
        assert!(MomentumGrid::new(1.0, 1.0, 16, Spacing::Linear).validate().is_err());
        assert!(MomentumGrid::new(0.0, 1.0, 16, Spacing::Log).validate().is_err());
        assert!(MomentumGrid::new(1e-3, 1.0, 16, Spacing::Log).validate().is_ok());
    }

    #[test]
    fn echo_sign_and_flags() {
        assert_eq!(echo_sign(0.2, 1.0), 1.0);
        assert_eq!(echo_sign(0.7, 1.0), -1.0);
        assert_eq!(ProtocolKind::Ramsey.echo_flags(), EchoFlags::default());
        assert!(ProtocolKind::LocalSpinEcho.echo_flags().fp_on_t2);
        assert!(!ProtocolKind::LocalSpinEcho.echo_flags().fp_on_t1);
        let g = ProtocolKind::GlobalSpinEcho.echo_flags();
        assert!(g.fp_on_t1 && g.fp_on_t2);
    }

    #[test]
    fn derived_cattaneo_quantities() {
        let p = CattaneoParams {
            c: 2.0,
            tau_d: 0.5,
            tau_s: 4.0,
            ..Default::default()
        };
        assert_eq!(p.gamma(), 2.0 + 0.25);
        assert_eq!(p.inv_tau_tilde(), p.gamma());
        assert_eq!(p.gamma_k_sq(3.0), 36.0 + 0.5);
        assert_eq!(p.diffusion_constant(), 2.0);
        assert_eq!(p.diffusion_length(), 8.0f64.sqrt());
    }

    #[test]
    fn tabulated_interpolation_is_monotone_and_refuses_extrapolation() {
        let k: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let omega: Vec<f64> = k.iter().map(|x: &f64| (1.0 + x * x).sqrt()).collect();
        let d = DispersionSpec::Tabulated(TabulatedDispersion { k, omega });
        assert!(d.validate().is_ok());
        let mut prev = 0.0;
        for i in 0..=500 {
            let x = i as f64 * 0.01;
            let w = d.omega(x).unwrap();
            assert!(w >= prev);
            assert!((w - (1.0 + x * x).sqrt()).abs() < 1.2e-2);
            prev = w;
        }
        // Reference values of the same monotone cubic from scipy's PchipInterpolator.
        for (x, want) in [
            (0.1, 1.0105810248490537),
            (0.28, 1.0494374658526553),
            (0.77, 1.2580558725510749),
            (1.3, 1.6392728863044084),
            (2.49, 2.6833226575108173),
            (3.14, 3.295315715672937),
            (4.6, 4.707414794327762),
            (4.99, 5.089209275873505),
        ] {
            assert!((d.omega(x).unwrap() - want).abs() < 1e-12, "omega({x})");
        }
        assert!(d.omega(5.01).is_err());
        assert_eq!(d.omega(2.5).unwrap(), (1.0f64 + 6.25).sqrt());
    }

    #[test]
    fn tabulated_interpolant_stays_non_negative() {
        let d = DispersionSpec::Tabulated(TabulatedDispersion {
            k: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            omega: vec![1.0, 0.0, 0.0, 2.0, 0.5],
        });
        for i in 0..=400 {
            assert!(d.omega(i as f64 * 0.01).unwrap() >= 0.0);
        }
    }

    fn positive() -> impl Strategy<Value = f64> {
        (1e-6f64..1e6).prop_map(|x| x)
    }

    proptest! {
        #[test]
        fn cattaneo_round_trips_bit_exact(c in positive(), td in positive(), ts in positive(),
                                          chi in positive(), temp in positive(), cut in positive(), a in positive()) {
            let p = CattaneoParams { c, tau_d: td, tau_s: ts, chi0: chi, temperature: temp, cutoff: cut, a };
            prop_assert!(p.validate().is_ok());
            let text = toml::to_string(&p).unwrap();
            let back: CattaneoParams = toml::from_str(&text).unwrap();
            prop_assert_eq!(back, p);
            let json = serde_json::to_string(&p).unwrap();
            let back: CattaneoParams = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn dispersion_and_occupation_round_trip(w0 in positive(), c in positive(), t in 0.0f64..1e3,
                                                 amp in 0.0f64..1e3, kdr in 0.0f64..10.0, s in positive()) {
            for d in [DispersionSpec::Gapped { omega0: w0, c }, DispersionSpec::Gapless { alpha: w0, z: 1.0 + c.ln().abs() }] {
                let text = toml::to_string(&d).unwrap();
                let back: DispersionSpec = toml::from_str(&text).unwrap();
                prop_assert_eq!(back, d);
            }
            let o = OccupationSpec::ThermalPlusGaussian { temperature: t, amplitude: amp, k_dr: kdr, sigma_dr: s };
            prop_assert!(o.validate().is_ok());
            let back: OccupationSpec = toml::from_str(&toml::to_string(&o).unwrap()).unwrap();
            prop_assert_eq!(back, o);
        }

        #[test]
        fn derived_quantities_match_formulas(c in positive(), td in positive(), ts in positive(), k in 0.0f64..1e3) {
            let p = CattaneoParams { c, tau_d: td, tau_s: ts, ..Default::default() };
            prop_assert_eq!(p.gamma(), 1.0 / td + 1.0 / ts);
            prop_assert_eq!(p.inv_tau_tilde(), 1.0 / td + 1.0 / ts);
            prop_assert_eq!(p.gamma_k_sq(k), c * c * k * k + (1.0 / td) * (1.0 / ts));
            prop_assert_eq!(p.diffusion_length(), (c * c * td * ts).sqrt());
        }

        #[test]
        fn thermal_and_gaussian_occupations_are_non_negative(t in 0.0f64..100.0, amp in 0.0f64..100.0,
                                                              k in 0.0f64..50.0, w in 1e-6f64..100.0) {
            let o = OccupationSpec::ThermalPlusGaussian { temperature: t, amplitude: amp, k_dr: 2.0, sigma_dr: 0.1 };
            prop_assert!(o.occupation(k, w) >= 0.0);
        }
    }
}
