//! Dephasing noise of a two-dimensional Cattaneo medium in the classical
//! regime.
//!
//! Each momentum shell contributes N_k(t) = ∫dω/2π 𝒲_Ram(ω, t) C(k, ω),
//! evaluated in closed form through the two poles
//! ω± = −iγ/2 ± s with s = √(Γ_k² − γ²/4):
//!
//! N_k = χ0 T/s · [G(ω+) − G(ω−)],
//! G(ω) = (Γ_k² − iγ_s ω)/ω³ · (1 − e^{−iωt} − iωt).
//!
//! The correlated noise is the Hankel transform
//! N12(r, t) = ∫₀^Λ J0(kr) F(k) N_k(t) k dk/2π with an optional form factor F.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffusive::cattaneo::{cattaneo_c, FdtMode};
use crate::error::{Error, Result};
use crate::filters::eval_filter;
use crate::harmonic::continuum::Accuracy;
use crate::model::{CattaneoParams, ProtocolKind};
use crate::numerics::fit::{geomspace, linspace};
use crate::numerics::quad::{gauss_legendre, integrate_adaptive, QuadOptions, ToleranceNorm};
use crate::numerics::special::{bessel_j0, bessel_k0};
use std::f64::consts::PI;

/// Below this value of |s| · max(t, 2/γ) the pole difference is evaluated
/// as an integral of G′ along the segment joining the poles.
const MERGED_POLES: f64 = 0.1;
/// Below this |ωt| the bracket is summed as a power series.
const SERIES_RADIUS: f64 = 1.0;
/// Oscillations of underdamped modes are ignored once they have decayed by
/// e^{−γt/2} < e^{−DECAYED}.
const DECAYED: f64 = 40.0;

/// N_k(t) per unit coupling λ1λ2, with the imaginary part left over by the
/// complex arithmetic relative to the real part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeNoiseValue {
    pub value: f64,
    pub imag_residue: f64,
}

/// B(x) = 1 − e^{−ix} − ix and x B′(x) − 3B(x).
fn bracket(x: Complex64) -> (Complex64, Complex64) {
    if x.norm() < SERIES_RADIUS {
        // B = −Σ_{n≥2} (−ix)ⁿ/n!, xB′ − 3B = −Σ_{n≥2} (n − 3)(−ix)ⁿ/n!.
        let z = Complex64::new(x.im, -x.re);
        let mut term = z;
        let mut b = Complex64::new(0.0, 0.0);
        let mut db = Complex64::new(0.0, 0.0);
        for n in 2..32 {
            term = term * z / n as f64;
            b -= term;
            db -= term * (n as f64 - 3.0);
        }
        (b, db)
    } else {
        let i = Complex64::i();
        let e = (-i * x).exp();
        let b = 1.0 - e - i * x;
        let bp = i * e - i;
        (b, x * bp - 3.0 * b)
    }
}

struct Poles {
    g2: f64,
    gamma_s: f64,
    center: Complex64,
    half_split: Complex64,
}

impl Poles {
    fn new(k: f64, p: &CattaneoParams) -> Self {
        let g2 = p.gamma_k_sq(k);
        let gamma = p.gamma();
        Self {
            g2,
            gamma_s: p.gamma_s(),
            center: Complex64::new(0.0, -0.5 * gamma),
            half_split: Complex64::new(g2 - 0.25 * gamma * gamma, 0.0).sqrt(),
        }
    }

    /// G(ω) at time t.
    fn g(&self, w: Complex64, t: f64) -> Complex64 {
        let x = w * t;
        let (b, _) = bracket(x);
        let pre = Complex64::new(self.g2, 0.0) - Complex64::i() * self.gamma_s * w;
        pre * b * t * t * t / (x * x * x)
    }

    /// dG/dω at time t.
    fn g_prime(&self, w: Complex64, t: f64) -> Complex64 {
        let x = w * t;
        let (b, db) = bracket(x);
        let pre = Complex64::new(self.g2, 0.0) - Complex64::i() * self.gamma_s * w;
        let x3 = x * x * x;
        let t3 = t * t * t;
        -Complex64::i() * self.gamma_s * t3 * b / x3 + pre * t3 * t * db / (x3 * x)
    }

    /// [G(ω+) − G(ω−)]/s from the two poles.
    fn split_difference(&self, t: f64) -> Complex64 {
        let s = self.half_split;
        (self.g(self.center + s, t) - self.g(self.center - s, t)) / s
    }

    /// The same quantity as ∫_{−1}^{1} G′(center + us) du.
    fn merged_difference(&self, t: f64) -> Complex64 {
        let (nodes, weights) = gauss_legendre(16);
        nodes
            .iter()
            .zip(&weights)
            .map(|(&u, &w)| self.g_prime(self.center + self.half_split * u, t) * w)
            .sum()
    }

    fn merged(&self, t: f64) -> bool {
        let scale = t.max(1.0 / self.center.im.abs());
        self.half_split.norm() * scale < MERGED_POLES
    }
}

fn assemble(raw: Complex64, p: &CattaneoParams) -> ModeNoiseValue {
    let v = raw * (p.chi0 * p.temperature);
    ModeNoiseValue {
        value: v.re,
        imag_residue: if v.re == 0.0 { v.im.abs() } else { (v.im / v.re).abs() },
    }
}

/// Closed-form N_k(t) per unit coupling.
///
/// Near the critical damping Γ_k = γ/2 the two poles merge and the
/// difference quotient is replaced by a Gauss–Legendre integral of G′
/// between them, which is exact in the limit and smooth across it.
pub fn diffusive_mode_noise(k: f64, t: f64, p: &CattaneoParams) -> ModeNoiseValue {
    if t <= 0.0 {
        return ModeNoiseValue {
            value: 0.0,
            imag_residue: 0.0,
        };
    }
    let poles = Poles::new(k, p);
    let raw = if poles.merged(t) {
        poles.merged_difference(t)
    } else {
        poles.split_difference(t)
    };
    assemble(raw, p)
}

/// Momentum at which the two poles of Γ_k² = γ²/4 coincide, if any.
pub fn critical_momentum(p: &CattaneoParams) -> Option<f64> {
    let excess = 0.25 * p.gamma() * p.gamma() - p.gamma_d() * p.gamma_s();
    (excess > 0.0).then(|| excess.sqrt() / p.c)
}

/// Correlated noise N12(r, t) per unit coupling with a momentum form factor.
pub fn diffusive_n12<F: Fn(f64) -> f64>(
    r: f64,
    t: f64,
    p: &CattaneoParams,
    form_factor: F,
    acc: &Accuracy,
) -> Result<f64> {
    if !(r >= 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!("need r >= 0 and t >= 0, got r = {r}, t = {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let lambda = p.cutoff;
    let mut breakpoints = linspace(0.0, lambda, 65);
    breakpoints.extend(critical_momentum(p));
    let oscillating = 0.5 * p.gamma() * t < DECAYED;
    let rate = r + if oscillating { p.c * t } else { 0.0 };
    let opts = QuadOptions {
        rel_tol: acc.rel_tol,
        abs_tol: acc.abs_tol,
        norm: ToleranceNorm::Magnitude,
        max_panels: acc.max_panels,
        breakpoints,
        frequency_hint: Some(rate),
    };
    let integrand = |k: f64| {
        let nk = diffusive_mode_noise(k, t, p).value;
        bessel_j0(k * r) * form_factor(k) * nk * k / (2.0 * std::f64::consts::PI)
    };
    integrate_adaptive(integrand, 0.0, lambda, &opts).require()
}

/// Local noise N1(t) = N12(0, t).
pub fn diffusive_n1<F: Fn(f64) -> f64>(t: f64, p: &CattaneoParams, form_factor: F, acc: &Accuracy) -> Result<f64> {
    diffusive_n12(0.0, t, p, form_factor, acc)
}

/// Spatial profile f(r, t) = N12(r, t)/N1(t); exactly 1 at r = 0.
pub fn diffusive_profile<F: Fn(f64) -> f64>(
    r: f64,
    t: f64,
    p: &CattaneoParams,
    form_factor: F,
    acc: &Accuracy,
) -> Result<f64> {
    if r == 0.0 {
        return Ok(1.0);
    }
    let n1 = diffusive_n1(t, p, &form_factor, acc)?;
    Ok(diffusive_n12(r, t, p, &form_factor, acc)? / n1)
}

/// Stationary profile K0(r/l_s)/K0(a/l_s) for r ≥ a.
pub fn stationary_profile(r: f64, p: &CattaneoParams) -> Result<f64> {
    if !(r >= p.a) {
        return Err(Error::Domain(format!(
            "stationary profile needs r >= a = {}, got {r}",
            p.a
        )));
    }
    let ls = p.diffusion_length();
    Ok(bessel_k0(r / ls)? / bessel_k0(p.a / ls)?)
}

/// Reference value of N_k(t) by direct frequency quadrature:
/// ∫dω/2π 𝒲_Ram(ω, t) C(k, ω) with classical statistics, integrated
/// adaptively on [0, Ω] (the integrand is even) plus the averaged tail
/// beyond Ω, where sin² → ½ and C ≈ 2χ0Tγ_s/ω².
pub fn mode_noise_by_frequency(k: f64, t: f64, p: &CattaneoParams) -> Result<f64> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let g = p.gamma_k_sq(k).sqrt();
    let omega_max = 400.0 * (g + p.gamma() + 1.0 / t);
    let mut breakpoints = geomspace(1e-3 * g.min(p.gamma()), omega_max, 80);
    for j in -8..=8 {
        breakpoints.push(g + j as f64 * 0.25 * p.gamma());
    }
    let opts = QuadOptions {
        rel_tol: 1e-11,
        abs_tol: 0.0,
        breakpoints,
        frequency_hint: Some(t),
        max_panels: 2_000_000,
        ..QuadOptions::default()
    };
    let f = |w: f64| eval_filter(ProtocolKind::Ramsey, w, t).re * cattaneo_c(k, w, p, FdtMode::Classical) / PI;
    let head = integrate_adaptive(f, 0.0, omega_max, &opts).require()?;
    let tail = 4.0 * p.chi0 * p.temperature * p.gamma_s() / (3.0 * PI * omega_max.powi(3));
    Ok(head + tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fit::{linear_fit, log_log_slope};
    use proptest::prelude::*;

    fn params() -> CattaneoParams {
        CattaneoParams::default()
    }

    #[test]
    fn zero_time_is_zero() {
        for k in [0.0, 0.1, 0.5, 3.0, 50.0] {
            assert_eq!(diffusive_mode_noise(k, 0.0, &params()).value, 0.0);
        }
    }

    #[test]
    fn closed_form_matches_frequency_quadrature() {
        let p = params();
        let kc = critical_momentum(&p).unwrap();
        for k in [0.0, 0.05, 0.3, kc, 0.9, 2.0, 10.0] {
            for t in [0.01, 0.3, 2.0, 15.0, 120.0] {
                let closed = diffusive_mode_noise(k, t, &p);
                let oracle = mode_noise_by_frequency(k, t, &p).unwrap();
                assert!(
                    (closed.value / oracle - 1.0).abs() < 1e-6,
                    "k={k} t={t}: {} vs {oracle}",
                    closed.value
                );
            }
        }
    }

    #[test]
    fn continuous_across_critical_damping() {
        let p = params();
        let kc = critical_momentum(&p).unwrap();
        for t in [1e-3, 0.5, 4.0, 60.0, 3000.0] {
            let at = diffusive_mode_noise(kc, t, &p).value;
            for eps in [1e-12, 1e-9, 1e-6] {
                let below = diffusive_mode_noise(kc * (1.0 - eps), t, &p).value;
                let above = diffusive_mode_noise(kc * (1.0 + eps), t, &p).value;
                // Allow for the genuine slope dN/dk over the step.
                let step = (above - below).abs();
                assert!(step <= 1e-8 * at + 10.0 * eps * at, "t={t} eps={eps}: {step}");
            }
        }
    }

    #[test]
    fn merged_and_split_evaluations_agree_near_the_switch() {
        let p = params();
        for t in [0.2f64, 3.0, 40.0] {
            for frac in [0.5, 0.9, 1.1, 2.0] {
                // Choose k so that |s|·max(t, 2/γ) = frac·MERGED_POLES on either branch.
                let scale = t.max(2.0 / p.gamma());
                let s = frac * MERGED_POLES / scale;
                for sign in [-1.0, 1.0] {
                    let g2 = 0.25 * p.gamma() * p.gamma() + sign * s * s;
                    let k = ((g2 - p.gamma_d() * p.gamma_s()).max(0.0)).sqrt() / p.c;
                    let poles = Poles::new(k, &p);
                    let a = poles.split_difference(t);
                    let b = poles.merged_difference(t);
                    assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300), "k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn early_time_exponent_is_two() {
        let p = params();
        let ts = geomspace(1e-5, 1e-4, 12);
        for k in [0.1, 1.0, 20.0, 50.0] {
            let n: Vec<f64> = ts.iter().map(|&t| diffusive_mode_noise(k, t, &p).value).collect();
            let slope = log_log_slope(&ts, &n).unwrap().slope;
            assert!((slope - 2.0).abs() < 0.05, "k={k}: {slope}");
        }
        // Equipartition: N_k ≈ χ0 T t² at early times.
        let t = 1e-6;
        assert!((diffusive_mode_noise(3.0, t, &p).value / (p.chi0 * p.temperature * t * t) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn late_time_growth_is_linear() {
        let p = params();
        for k in [0.05, 0.7, 5.0] {
            let ts = geomspace(2e3, 2e4, 8);
            let n: Vec<f64> = ts.iter().map(|&t| diffusive_mode_noise(k, t, &p).value).collect();
            let fit = linear_fit(&ts, &n).unwrap();
            assert!(fit.r_squared > 1.0 - 1e-9, "k={k}");
            let slope = log_log_slope(&ts, &n).unwrap().slope;
            assert!((slope - 1.0).abs() < 0.05, "k={k}: {slope}");
        }
    }

    #[test]
    fn local_noise_is_the_zero_separation_limit() {
        let p = params();
        let acc = Accuracy::with_rel(1e-9);
        for t in [0.05, 1.0, 30.0] {
            let n1 = diffusive_n1(t, &p, |_| 1.0, &acc).unwrap();
            let n12 = diffusive_n12(0.0, t, &p, |_| 1.0, &acc).unwrap();
            assert_eq!(n1, n12);
            assert!(n1 > 0.0);
            assert_eq!(diffusive_profile(0.0, t, &p, |_| 1.0, &acc).unwrap(), 1.0);
            let tiny = diffusive_profile(1e-9, t, &p, |_| 1.0, &acc).unwrap();
            assert!((tiny - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn profile_is_bounded_at_equilibrium() {
        let p = params();
        let acc = Accuracy::with_rel(1e-9);
        for t in [0.05, 0.5, 5.0, 50.0] {
            for r in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0] {
                let f = diffusive_profile(r, t, &p, |_| 1.0, &acc).unwrap();
                assert!(f.abs() <= 1.0 + 1e-6, "r={r} t={t}: {f}");
            }
        }
    }

    #[test]
    fn hankel_integral_matches_fixed_grid_rule() {
        // Independent evaluation: 4000 Gauss–Legendre panels of 20 nodes.
        let p = params();
        let (x, w) = gauss_legendre(20);
        let panels = 4000;
        let h = p.cutoff / panels as f64;
        for (r, t) in [(0.0, 0.7), (0.4, 0.7), (2.0, 5.0), (0.3, 300.0)] {
            let mut sum = 0.0;
            for j in 0..panels {
                let mid = (j as f64 + 0.5) * h;
                for (xi, wi) in x.iter().zip(&w) {
                    let k = mid + 0.5 * h * xi;
                    sum += 0.5 * h * wi * bessel_j0(k * r) * diffusive_mode_noise(k, t, &p).value * k / (2.0 * PI);
                }
            }
            let got = diffusive_n12(r, t, &p, |_| 1.0, &Accuracy::with_rel(1e-10)).unwrap();
            assert!(
                (got - sum).abs() <= 1e-8 * sum.abs().max(1e-6),
                "r={r} t={t}: {got} vs {sum}"
            );
        }
    }

    #[test]
    fn stationary_profile_reference_values() {
        let p = params();
        assert_eq!(stationary_profile(p.a, &p).unwrap(), 1.0);
        assert!(matches!(stationary_profile(0.5 * p.a, &p), Err(Error::Domain(_))));
        let ls = p.diffusion_length();
        // Beyond 5 l_s, ratios over one diffusion length follow e^{−x}/√x.
        for x in [5.0, 7.5, 10.0, 20.0] {
            let got = stationary_profile((x + 1.0) * ls, &p).unwrap() / stationary_profile(x * ls, &p).unwrap();
            let shape = |y: f64| (-y).exp() / y.sqrt();
            let want = shape(x + 1.0) / shape(x);
            assert!((got / want - 1.0).abs() < 0.01, "x={x}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]
        #[test]
        fn mode_noise_is_real_and_non_negative(k in 0.0f64..60.0, lt in -4.0f64..5.0) {
            let t = 10f64.powf(lt);
            let v = diffusive_mode_noise(k, t, &params());
            prop_assert!(v.value >= 0.0);
            prop_assert!(v.imag_residue <= 1e-10, "residue {}", v.imag_residue);
        }
    }
}
