//! Self-check suite: closed forms against independent numerical oracles and
//! structural invariants, grouped by topic.
//!
//! Every check reports a measured error and the tolerance it is held to, so
//! a tightened tolerance produces a failed check rather than an abort.

use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::growth_rate;
use crate::diffusive::{
    critical_momentum, diffusive_mode_noise, diffusive_n1, dipole_kernel_fourier, dipole_kernel_fourier_numeric,
    mode_noise_by_frequency, nv_form_factor, stationary_profile,
};
use crate::error::{Error, Result, Validate};
use crate::filters::{eval_filter, filter_combination, low_frequency_exponent};
use crate::harmonic::continuum::Accuracy;
use crate::harmonic::{gapless_scaling_f, harmonic_n12, mode_c, mode_chi, mode_noise, mode_response, parametric_state};
use crate::markov::{markov_signal, MarkovSpec};
use crate::model::{
    CattaneoParams, DispersionSpec, MomentumGrid, NvParams, OccupationSpec, ProbeGeometry, ProtocolKind, Spacing,
    TabulatedDispersion,
};
use crate::numerics::fit::{geomspace, linspace, log_log_slope};
use crate::numerics::oracle::{oracle_double_time_integral, EchoFlags};
use crate::numerics::quad::{integrate_adaptive, QuadOptions};
use crate::numerics::special::{bessel_j0, bessel_k0};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Names of the check groups, in report order.
pub const GROUPS: [&str; 10] = [
    "identity",
    "filters",
    "oracle",
    "special",
    "markov",
    "gapless",
    "parametric",
    "diffusive",
    "dipole",
    "model",
];

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub group: String,
    pub name: String,
    /// Measured error; absent when the check could not be evaluated.
    pub measured: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Machine-readable verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub groups: Vec<String>,
    pub tolerance_override: Option<f64>,
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub failed: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

type Measure = Box<dyn Fn() -> Result<f64> + Send + Sync>;

struct Check {
    group: &'static str,
    name: &'static str,
    tolerance: f64,
    measure: Measure,
}

fn check(
    group: &'static str,
    name: &'static str,
    tolerance: f64,
    f: impl Fn() -> Result<f64> + Send + Sync + 'static,
) -> Check {
    Check {
        group,
        name,
        tolerance,
        measure: Box::new(f),
    }
}

fn rel(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Random positive spectrum of `n` modes, as (ω, weight) pairs.
fn random_spectrum(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.gen_range(0.2..5.0), rng.gen_range(0.1..1.0)))
        .collect()
}

/// ½∫∫ f(t2) g(t1) Σ w χ_ω(t2 − t1) by the time-domain oracle.
fn oracle_response(spectrum: &[(f64, f64)], protocol: ProtocolKind, t: f64, n_steps: usize) -> f64 {
    let kernel = |t2: f64, t1: f64| spectrum.iter().map(|&(w, a)| a * mode_chi(w, t2 - t1)).sum::<f64>();
    0.5 * oracle_double_time_integral(kernel, t, protocol.echo_flags(), n_steps).value
}

fn identity_checks() -> Vec<Check> {
    use ProtocolKind::*;
    vec![
        check("identity", "echo_identity_random_spectra", 1e-8, || {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut worst: f64 = 0.0;
            for _ in 0..5 {
                let spec = random_spectrum(&mut rng, 16);
                let t = rng.gen_range(0.5..3.0);
                let ram = oracle_response(&spec, Ramsey, t, 512);
                let lse = oracle_response(&spec, LocalSpinEcho, t, 512);
                let gse = oracle_response(&spec, GlobalSpinEcho, t, 512);
                worst = worst.max(((ram - (gse - 2.0 * lse)) / ram).abs());
            }
            Ok(worst)
        }),
        check("identity", "echo_identity_closed_form", 1e-12, || {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            let mut worst: f64 = 0.0;
            for _ in 0..20 {
                let spec = random_spectrum(&mut rng, 16);
                let t = rng.gen_range(0.5..3.0);
                let x = |p| spec.iter().map(|&(w, a)| a * mode_response(p, w, t)).sum::<f64>();
                worst = worst.max(((x(Ramsey) - (x(GlobalSpinEcho) - 2.0 * x(LocalSpinEcho))) / x(Ramsey)).abs());
            }
            Ok(worst)
        }),
        check("identity", "filter_combination", 1e-12, || {
            let mut worst: f64 = 0.0;
            for t in [0.3, 1.0, 4.0] {
                for w in linspace(-30.0, 30.0, 241) {
                    let sum = eval_filter(Ramsey, w, t) - eval_filter(GlobalSpinEcho, w, t)
                        + eval_filter(LocalSpinEcho, w, t) * 2.0;
                    worst = worst.max((sum - filter_combination(w, t)).norm() / (t * t));
                }
            }
            Ok(worst)
        }),
    ]
}

fn filter_checks() -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for (kind, name) in [
        (ProtocolKind::Ramsey, "low_frequency_exponent_ramsey"),
        (ProtocolKind::LocalSpinEcho, "low_frequency_exponent_local_echo"),
        (ProtocolKind::GlobalSpinEcho, "low_frequency_exponent_global_echo"),
    ] {
        out.push(check("filters", name, 0.05, move || {
            let t = 1.3;
            let w = geomspace(1e-4, 1e-2, 25);
            let y: Vec<f64> = w.iter().map(|&o| eval_filter(kind, o, t).norm()).collect();
            let fit = log_log_slope(&w, &y).ok_or_else(|| Error::Domain("degenerate fit".into()))?;
            Ok((fit.slope - low_frequency_exponent(kind) as f64).abs())
        }));
    }
    out.push(check("filters", "ramsey_zero_frequency_limit", 1e-15, || {
        Ok(max_of([0.5, 2.0, 7.0].map(|t: f64| {
            rel(eval_filter(ProtocolKind::Ramsey, 0.0, t).re, t * t)
        })))
    }));
    out.push(check("filters", "ramsey_vs_time_integral", 1e-9, || {
        let mut worst: f64 = 0.0;
        for (w, t) in [(0.7, 1.0), (3.1, 2.5), (12.0, 0.8)] {
            let opts = QuadOptions {
                frequency_hint: Some(w),
                ..QuadOptions::with_tol(1e-13, 1e-14)
            };
            let re = integrate_adaptive(|s: f64| (w * s).cos(), 0.0, t, &opts).require()?;
            let im = integrate_adaptive(|s: f64| (w * s).sin(), 0.0, t, &opts).require()?;
            worst = worst.max((eval_filter(ProtocolKind::Ramsey, w, t).re - (re * re + im * im)).abs() / (t * t));
        }
        Ok(worst)
    }));
    out
}

fn oracle_checks() -> Vec<Check> {
    let samples = [(0.3, 0.5), (2.0, 2.0), (7.0, 1.1), (1.4, 4.0)];
    let mut out: Vec<Check> = Vec::new();
    for (kind, name) in [
        (ProtocolKind::Ramsey, "mode_response_ramsey"),
        (ProtocolKind::LocalSpinEcho, "mode_response_local_echo"),
        (ProtocolKind::GlobalSpinEcho, "mode_response_global_echo"),
    ] {
        out.push(check("oracle", name, 1e-6, move || {
            Ok(max_of(samples.map(|(w, t)| {
                let o = oracle_response(&[(w, 1.0)], kind, t, 1024);
                rel(mode_response(kind, w, t), o)
            })))
        }));
    }
    out.push(check("oracle", "mode_noise", 1e-6, move || {
        Ok(max_of(samples.map(|(w, t)| {
            let n = 0.4 * w;
            let o = oracle_double_time_integral(|a, b| mode_c(w, n, a - b), t, EchoFlags::default(), 1024).value;
            rel(mode_noise(w, n, t), o)
        })))
    }));
    out
}

fn special_checks() -> Vec<Check> {
    vec![
        check("special", "bessel_j0_reference", 1e-12, || {
            Ok(max_of(
                [
                    (1.0, 0.7651976865579665),
                    (5.0, -0.1775967713143383),
                    (12.5, 0.14688405470042093),
                    (40.0, 0.007366890584236951),
                ]
                .map(|(x, want): (f64, f64)| (bessel_j0(x) - want).abs()),
            ))
        }),
        check("special", "bessel_k0_reference", 1e-12, || {
            let mut worst: f64 = 0.0;
            for (x, want) in [
                (0.05, 3.1142340294719917),
                (1.0, 0.42102443824070823),
                (4.0, 0.011159676085853023),
            ] {
                worst = worst.max(rel(bessel_k0(x)?, want));
            }
            Ok(worst)
        }),
    ]
}

fn markov_checks() -> Vec<Check> {
    vec![
        check("markov", "closed_forms", 1e-12, || {
            let spec = MarkovSpec {
                gamma0: 1.3,
                gamma_r: 0.4,
            };
            let mut worst: f64 = 0.0;
            for t in [0.0, 0.5, 2.5, 10.0] {
                let s = markov_signal(&spec, t)?;
                worst = worst
                    .max(rel(s.n12, 0.4 * t))
                    .max(rel(s.n1, 0.65 * t))
                    .max(rel(s.coherence, (-(s.n1 + s.n2 - s.n12)).exp()));
            }
            Ok(worst)
        }),
        check("markov", "equal_rates_constant_coherence", 1e-12, || {
            let spec = MarkovSpec {
                gamma0: 0.8,
                gamma_r: 0.8,
            };
            let mut worst: f64 = 0.0;
            for t in linspace(0.0, 50.0, 11) {
                worst = worst.max((markov_signal(&spec, t)?.coherence - 1.0).abs());
            }
            Ok(worst)
        }),
    ]
}

fn gapless_checks() -> Vec<Check> {
    vec![
        check("gapless", "scaling_function_asymptote", 1e-4, || {
            let u: f64 = 1600.0;
            let f = gapless_scaling_f(3, 2.0, u, &Accuracy::with_rel(1e-10))?;
            Ok(rel(f * 4.0 * std::f64::consts::PI * u.sqrt(), 1.0))
        }),
        check("gapless", "collapse_d3_z2", 0.02, || {
            let disp = DispersionSpec::Gapless { alpha: 1.0, z: 2.0 };
            let occ = OccupationSpec::Thermal { temperature: 1.0 };
            let geom = ProbeGeometry {
                dim: 3,
                ..ProbeGeometry::default()
            };
            let grid = MomentumGrid::new(0.0, 30.0, 64, Spacing::Linear);
            let acc = Accuracy::with_rel(1e-8);
            let mut worst: f64 = 0.0;
            for t in [10.0f64, 100.0] {
                for u in [0.1, 1.0, 5.0] {
                    let n = harmonic_n12(&disp, &occ, &geom.with_r((u * t).sqrt()), t, &grid, &acc)?;
                    worst = worst.max(rel(n / t.powf(1.5), gapless_scaling_f(3, 2.0, u, &acc)?));
                }
            }
            Ok(worst)
        }),
    ]
}

fn drive(t_drive: f64) -> OccupationSpec {
    OccupationSpec::ParametricEvolved {
        temperature: 1.0,
        delta: 0.2,
        drive_frequency: 3.0,
        t_drive,
    }
}

fn parametric_checks() -> Vec<Check> {
    vec![
        check("parametric", "zero_duration_is_thermal", 0.0, || {
            let mut worst: f64 = 0.0;
            for w in [0.5, 1.5, 4.0] {
                let s = parametric_state(&drive(0.0), w)?;
                worst = worst.max((s.n - s.n_thermal).abs()).max(s.m.abs());
            }
            Ok(worst)
        }),
        check("parametric", "resonant_growth_rate", 0.01, || {
            let t = linspace(5.0, 50.0, 19);
            let mut envelope = Vec::with_capacity(t.len());
            for &ti in &t {
                let s = parametric_state(&drive(ti), 1.5)?;
                envelope.push(s.n + 0.5 + s.m);
            }
            let fit = growth_rate(&t, &envelope).ok_or_else(|| Error::Domain("degenerate fit".into()))?;
            Ok(rel(fit.slope, 0.2))
        }),
    ]
}

fn diffusive_checks() -> Vec<Check> {
    vec![
        check("diffusive", "mode_noise_vs_frequency_quadrature", 1e-6, || {
            let p = CattaneoParams::default();
            let kc = critical_momentum(&p).unwrap_or(0.1);
            let mut worst: f64 = 0.0;
            for k in [0.0, 0.3, kc, 2.0] {
                for t in [0.3, 15.0] {
                    worst = worst.max(rel(
                        diffusive_mode_noise(k, t, &p).value,
                        mode_noise_by_frequency(k, t, &p)?,
                    ));
                }
            }
            Ok(worst)
        }),
        check("diffusive", "early_time_exponent", 0.05, || {
            let p = CattaneoParams::default();
            let t = geomspace(1e-5, 1e-4, 6);
            let mut n1 = Vec::with_capacity(t.len());
            for &ti in &t {
                n1.push(diffusive_n1(ti, &p, |_| 1.0, &Accuracy::with_rel(1e-9))?);
            }
            let fit = log_log_slope(&t, &n1).ok_or_else(|| Error::Domain("degenerate fit".into()))?;
            Ok((fit.slope - 2.0).abs())
        }),
        check("diffusive", "stationary_profile_normalization", 1e-12, || {
            let p = CattaneoParams::default();
            Ok((stationary_profile(p.a, &p)? - 1.0).abs())
        }),
    ]
}

fn dipole_checks() -> Vec<Check> {
    vec![
        check("dipole", "fourier_vs_numeric_transform", 0.01, || {
            let d = 1.0;
            let q = [0.7f64.cos(), 0.7f64.sin()];
            let analytic = dipole_kernel_fourier(q, d, 1.0);
            Ok(max_of([(0, 0), (0, 2), (2, 2)].map(|(a, b)| {
                let num: Complex64 = dipole_kernel_fourier_numeric(a, b, q, d);
                (num - analytic[a][b]).norm() / analytic[a][b].norm()
            })))
        }),
        check("dipole", "form_factor_peak", 1e-9, || {
            let nv = NvParams {
                d: 0.7,
                ..NvParams::default()
            };
            let slope = |k: f64| {
                let h = 1e-5 / nv.d;
                nv_form_factor(k + h, &nv) - nv_form_factor(k - h, &nv)
            };
            let (mut lo, mut hi) = (0.1 / nv.d, 10.0 / nv.d);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if slope(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok((0.5 * (lo + hi) * nv.d - 1.0).abs())
        }),
    ]
}

fn model_checks() -> Vec<Check> {
    vec![
        check("model", "tabulated_monotone_cubic_reference", 1e-12, || {
            let k: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
            let omega = k.iter().map(|x| (1.0 + x * x).sqrt()).collect();
            let d = DispersionSpec::Tabulated(TabulatedDispersion { k, omega });
            let mut worst: f64 = 0.0;
            for (x, want) in [
                (0.28, 1.0494374658526553),
                (1.3, 1.6392728863044084),
                (4.6, 4.707414794327762),
            ] {
                worst = worst.max((d.omega(x)? - want).abs());
            }
            Ok(worst)
        }),
        check("model", "invalid_inputs_rejected", 0.0, || {
            let bad_gap = DispersionSpec::Gapped { omega0: -1.0, c: 1.0 }.validate().is_ok();
            let bad_dim = ProbeGeometry {
                dim: 4,
                ..ProbeGeometry::default()
            }
            .validate()
            .is_ok();
            let bad_medium = CattaneoParams {
                tau_s: 0.0,
                ..CattaneoParams::default()
            }
            .validate()
            .is_ok();
            Ok([bad_gap, bad_dim, bad_medium].iter().filter(|&&ok| ok).count() as f64)
        }),
    ]
}

fn all_checks() -> Vec<Check> {
    let mut out = identity_checks();
    out.extend(filter_checks());
    out.extend(oracle_checks());
    out.extend(special_checks());
    out.extend(markov_checks());
    out.extend(gapless_checks());
    out.extend(parametric_checks());
    out.extend(diffusive_checks());
    out.extend(dipole_checks());
    out.extend(model_checks());
    out
}

/// Runs the named groups (all when `groups` is empty). A tolerance override
/// replaces every check's own tolerance.
pub fn run_verify(groups: &[String], tolerance_override: Option<f64>, workers: usize) -> Result<VerifyReport> {
    for g in groups {
        if !GROUPS.contains(&g.as_str()) {
            return Err(Error::Config(format!(
                "unknown verification group `{g}`; known groups: {}",
                GROUPS.join(", ")
            )));
        }
    }
    if let Some(t) = tolerance_override {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("tolerance override must be >= 0, got {t}")));
        }
    }
    let selected: Vec<String> = if groups.is_empty() {
        GROUPS.iter().map(|s| s.to_string()).collect()
    } else {
        GROUPS
            .iter()
            .filter(|g| groups.iter().any(|x| x == *g))
            .map(|s| s.to_string())
            .collect()
    };
    let checks: Vec<Check> = all_checks()
        .into_iter()
        .filter(|c| selected.iter().any(|g| g == c.group))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CheckResult> = pool.install(|| {
        checks
            .par_iter()
            .map(|c| {
                let tolerance = tolerance_override.unwrap_or(c.tolerance);
                let outcome = catch_unwind(AssertUnwindSafe(|| (c.measure)()))
                    .unwrap_or_else(|_| Err(Error::Domain("check panicked".into())));
                let (measured, error) = match outcome {
                    Ok(v) if v.is_finite() => (Some(v), None),
                    Ok(v) => (None, Some(format!("non-finite measurement {v}"))),
                    Err(e) => (None, Some(e.to_string())),
                };
                CheckResult {
                    group: c.group.to_string(),
                    name: c.name.to_string(),
                    measured,
                    tolerance,
                    passed: measured.is_some_and(|m| m <= tolerance),
                    error,
                }
            })
            .collect()
    });
    let passed = results.iter().filter(|r| r.passed).count();
    Ok(VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        groups: selected,
        tolerance_override,
        failed: results.len() - passed,
        passed,
        checks: results,
    })
}
