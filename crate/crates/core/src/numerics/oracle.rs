//! Brute-force evaluation of ∫₀ᵗ∫₀ᵗ f(t2) g(t1) K(t2, t1) dt1 dt2 by
//! iterated composite Simpson rules.
//!
//! The echo sign flips at t/2 and causal kernels have a kink on the
//! diagonal t1 = t2, so both axes are split at t/2 and the inner axis is
//! also split at t2. Every piece is smooth, which keeps fourth-order
//! convergence.

/// Which time arguments carry the echo sign sgn(t/2 − τ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EchoFlags {
    pub fp_on_t1: bool,
    pub fp_on_t2: bool,
}

/// Oracle value with a Richardson estimate from a half-resolution run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub error_estimate: f64,
}

fn simpson<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / m as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// Even interval count for a piece of length `len` at nominal resolution
/// `n` intervals over `t`.
fn intervals(len: f64, t: f64, n: usize) -> usize {
    let m = (n as f64 * len / t / 2.0).ceil() as usize;
    2 * m.max(1)
}

fn evaluate<K: Fn(f64, f64) -> f64>(kernel: &K, t: f64, flags: EchoFlags, n: usize) -> f64 {
    let half = 0.5 * t;
    let sign = |on: bool, mid: f64| if on && mid > half { -1.0 } else { 1.0 };
    let inner = |t2: f64| {
        let mut cuts = [0.0, half, t2, t];
        cuts.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                continue;
            }
            let s = sign(flags.fp_on_t1, 0.5 * (lo + hi));
            acc += s * simpson(|t1| kernel(t2, t1), lo, hi, intervals(hi - lo, t, n));
        }
        acc
    };
    let mut total = 0.0;
    for (lo, hi) in [(0.0, half), (half, t)] {
        let s = sign(flags.fp_on_t2, 0.5 * (lo + hi));
        total += s * simpson(inner, lo, hi, intervals(hi - lo, t, n));
    }
    total
}

/// Double time integral of `kernel(t2, t1)` over [0, t]², optionally
/// weighted by the echo sign on either axis. `n_steps` (at least 64) is the
/// nominal number of Simpson intervals across [0, t] on each axis.
pub fn oracle_double_time_integral<K: Fn(f64, f64) -> f64>(
    kernel: K,
    t: f64,
    flags: EchoFlags,
    n_steps: usize,
) -> OracleResult {
    if t <= 0.0 {
        return OracleResult {
            value: 0.0,
            error_estimate: 0.0,
        };
    }
    let n = n_steps.max(64).div_ceil(4) * 4;
    let fine = evaluate(&kernel, t, flags, n);
    let coarse = evaluate(&kernel, t, flags, n / 2);
    OracleResult {
        value: fine,
        error_estimate: (fine - coarse).abs() / 15.0,
    }
}
