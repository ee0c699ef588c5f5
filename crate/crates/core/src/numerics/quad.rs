//! Globally adaptive Gauss–Kronrod (10/21) quadrature.
//!
//! Panels are refined by bisecting the one with the largest error estimate.
//! Optional breakpoints and an oscillation frequency hint shape the initial
//! partition. The final value is a pairwise sum over panels in left-to-right
//! order, so results do not depend on the refinement history.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_464,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Quantity the relative tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ToleranceNorm {
    /// |∫ f|, the usual choice.
    #[default]
    Value,
    /// ∫ |f|, appropriate for oscillatory integrals whose value may cancel.
    Magnitude,
}

/// Controls for [`integrate_adaptive`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub norm: ToleranceNorm,
    /// Upper bound on the number of panels.
    pub max_panels: usize,
    /// Interior points where the integrand has kinks or sharp features.
    pub breakpoints: Vec<f64>,
    /// Largest angular frequency of the integrand in the integration
    /// variable. Initial panels are no wider than a quarter period.
    pub frequency_hint: Option<f64>,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            norm: ToleranceNorm::Value,
            max_panels: 200_000,
            breakpoints: Vec::new(),
            frequency_hint: None,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Estimate of ∫ |f| over the interval.
    pub abs_integral: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Tolerance the error estimate was compared against.
    pub tolerance: f64,
}

impl QuadratureResult {
    /// Converts a non-converged result into an error.
    pub fn require(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::QuadratureNotConverged {
                value: self.value,
                abs_error: self.abs_error_estimate,
                tolerance: self.tolerance,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Applies the 21-point Kronrod rule and its embedded 10-point Gauss rule.
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = (WGK[10] * fc).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && error < floor {
        error = floor;
    }
    Panel {
        a,
        b,
        value,
        error,
        magnitude: res_abs,
    }
}

/// Sums values in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn initial_partition(a: f64, b: f64, opts: &QuadOptions) -> Vec<f64> {
    let mut pts: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > a && *p < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let Some(omega) = opts.frequency_hint.filter(|w| w.is_finite() && *w > 0.0) else {
        return pts;
    };
    let quarter = 0.5 * std::f64::consts::PI / omega;
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let n = ((w[1] - w[0]) / quarter).ceil().max(1.0) as usize;
        let n = n.min(opts.max_panels.max(1));
        for i in 0..n {
            out.push(w[0] + (w[1] - w[0]) * i as f64 / n as f64);
        }
    }
    out.push(b);
    out
}

/// Integrates `f` over `[a, b]` to the tolerance in `opts`.
///
/// Never fails: a result with `converged == false` carries the best
/// estimate reached when the panel budget ran out.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> QuadratureResult {
    if a == b {
        return QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            abs_integral: 0.0,
            evaluations: 0,
            converged: true,
            tolerance: opts.abs_tol,
        };
    }
    if a > b {
        let r = integrate_adaptive(f, b, a, opts);
        return QuadratureResult { value: -r.value, ..r };
    }
    let pts = initial_partition(a, b, opts);
    let mut heap = BinaryHeap::with_capacity(pts.len() * 2);
    let mut evaluations = 0usize;
    let mut done: Vec<Panel> = Vec::new();
    for w in pts.windows(2) {
        heap.push(gk21(&f, w[0], w[1]));
        evaluations += 21;
    }

    let tolerance_for = |value: f64, magnitude: f64| {
        let scale = match opts.norm {
            ToleranceNorm::Value => value.abs(),
            ToleranceNorm::Magnitude => magnitude,
        };
        opts.abs_tol.max(opts.rel_tol * scale)
    };
    let totals = |heap: &BinaryHeap<Panel>, done: &[Panel]| {
        let mut v = 0.0;
        let mut e = 0.0;
        let mut m = 0.0;
        for p in heap.iter().chain(done.iter()) {
            v += p.value;
            e += p.error;
            m += p.magnitude;
        }
        (v, e, m)
    };

    let (mut value, mut error, mut magnitude) = totals(&heap, &done);
    let mut since_resync = 0usize;
    while error > tolerance_for(value, magnitude) && heap.len() + done.len() < opts.max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in floating point.
            done.push(worst);
            continue;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
        since_resync += 1;
        if since_resync >= 64 {
            (value, error, magnitude) = totals(&heap, &done);
            since_resync = 0;
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(done);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
    let mags: Vec<f64> = panels.iter().map(|p| p.magnitude).collect();
    let value = pairwise_sum(&values);
    let error = pairwise_sum(&errors);
    let magnitude = pairwise_sum(&mags);
    let tolerance = tolerance_for(value, magnitude);
    QuadratureResult {
        value,
        abs_error_estimate: error,
        abs_integral: magnitude,
        evaluations,
        converged: error <= tolerance && value.is_finite(),
        tolerance,
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
///
/// Nodes are found by Newton iteration on P_n from the Tricomi initial
/// guesses and returned in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::bessel_j0;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        let opts = QuadOptions::default();
        for k in 0..=31 {
            let p = gk21(&|x: f64| x.powi(k), 0.0, 1.0);
            assert!((p.value - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "degree {k}");
        }
        let r = integrate_adaptive(|x| x * x, 0.0, 1.0, &opts);
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let sg: f64 = 2.0 * WG.iter().sum::<f64>();
        let sk: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((sg - 2.0).abs() < 1e-14);
        assert!((sk - 2.0).abs() < 1e-14);
    }

    #[test]
    fn full_period_of_sine_vanishes() {
        let opts = QuadOptions::with_tol(1e-12, 1e-12);
        let r = integrate_adaptive(f64::sin, 0.0, 2.0 * PI, &opts);
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn laplace_transform_of_j0() {
        // ∫₀^∞ e^{-x} J0(x) dx = 1/√2; the tail beyond 40 is below e^{-40}.
        let mut opts = QuadOptions::with_tol(1e-12, 1e-14);
        opts.frequency_hint = Some(1.0);
        let r = integrate_adaptive(|x| (-x).exp() * bessel_j0(x), 0.0, 40.0, &opts);
        assert!(r.converged);
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-8, "{}", r.value);
        // Independent high-resolution trapezoid oracle.
        let n = 400_000;
        let h = 40.0 / n as f64;
        let mut s = 0.5 * (1.0 + (-40.0f64).exp() * bessel_j0(40.0));
        for i in 1..n {
            let x = i as f64 * h;
            s += (-x).exp() * bessel_j0(x);
        }
        assert!((s * h - r.value).abs() < 1e-8);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let opts = QuadOptions::default();
        let f = integrate_adaptive(f64::exp, 0.0, 1.0, &opts).value;
        let g = integrate_adaptive(f64::exp, 1.0, 0.0, &opts).value;
        assert_eq!(f, -g);
    }

    #[test]
    fn breakpoints_resolve_kinks() {
        let mut opts = QuadOptions::with_tol(1e-13, 0.0);
        opts.breakpoints = vec![0.3];
        let r = integrate_adaptive(|x| (x - 0.3).abs(), 0.0, 1.0, &opts);
        assert!(r.converged);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(r.evaluations, 42);
    }

    #[test]
    fn frequency_hint_sets_panel_width() {
        let mut opts = QuadOptions::default();
        opts.frequency_hint = Some(10.0);
        let pts = initial_partition(0.0, 1.0, &opts);
        let quarter = 0.5 * PI / 10.0;
        assert!(pts.windows(2).all(|w| w[1] - w[0] <= quarter + 1e-15));
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let mut opts = QuadOptions::with_tol(1e-10, 0.0);
        opts.frequency_hint = Some(30.0);
        let f = |k: f64| k * bessel_j0(7.0 * k) * (30.0 * k).sin().powi(2) / (1.0 + k * k);
        let a = integrate_adaptive(f, 0.0, 20.0, &opts);
        let b = integrate_adaptive(f, 0.0, 20.0, &opts);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut opts = QuadOptions::with_tol(1e-15, 0.0);
        opts.max_panels = 4;
        let r = integrate_adaptive(|x: f64| x.sqrt().recip(), 1e-300, 1.0, &opts);
        assert!(!r.converged);
        assert!(r.require().is_err());
    }

    #[test]
    fn converged_implies_error_within_tolerance() {
        let opts = QuadOptions::with_tol(1e-9, 0.0);
        let r = integrate_adaptive(|x: f64| (50.0 * x).cos() * (-x).exp(), 0.0, 3.0, &opts);
        assert!(r.converged);
        assert!(r.abs_error_estimate <= r.tolerance);
    }

    #[test]
    fn pairwise_sum_matches_naive_for_small_inputs() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_two_n_minus_one() {
        for n in [1usize, 2, 5, 8, 16, 21] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }
}
