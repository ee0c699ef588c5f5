//! Post-processing of computed profiles: fronts, fringe periods, envelope
//! decay lengths and growth rates.

use crate::numerics::fit::{linear_fit, LineFit};

/// Outermost separation at which `f` falls through `threshold`.
///
/// Scans for the last sample with f ≥ threshold and interpolates linearly
/// to the next sample. Returns `None` if no sample reaches the threshold
/// or if the profile is still above it at the last sample.
pub fn front_position(r: &[f64], f: &[f64], threshold: f64) -> Option<f64> {
    if r.len() != f.len() || r.is_empty() {
        return None;
    }
    let last = f.iter().rposition(|&v| v >= threshold)?;
    if last + 1 == f.len() {
        return None;
    }
    let (r0, r1, f0, f1) = (r[last], r[last + 1], f[last], f[last + 1]);
    Some(r0 + (f0 - threshold) / (f0 - f1) * (r1 - r0))
}

/// Mean-removed autocorrelation of evenly spaced samples for lags
/// 0..len, normalized to 1 at zero lag.
pub fn autocorrelation(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    (0..n)
        .map(|lag| {
            let c: f64 = dev[..n - lag].iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum();
            if c0 > 0.0 {
                c / c0
            } else {
                0.0
            }
        })
        .collect()
}

/// Lag (in units of `step`) of the first autocorrelation maximum after the
/// first zero crossing, i.e. the dominant spatial period.
pub fn autocorrelation_peak_lag(values: &[f64], step: f64) -> Option<f64> {
    let ac = autocorrelation(values);
    let first_negative = ac.iter().position(|&c| c < 0.0)?;
    let mut best: Option<usize> = None;
    for i in first_negative.max(1)..ac.len().saturating_sub(1) {
        if ac[i] >= ac[i - 1] && ac[i] >= ac[i + 1] && ac[i] > 0.0 {
            best = Some(i);
            break;
        }
    }
    best.map(|i| i as f64 * step)
}

/// Fringe amplitudes: half the jump between consecutive local extrema,
/// placed midway between them. A slowly varying offset cancels.
pub fn fringe_amplitudes(r: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let extrema: Vec<usize> = (1..values.len().saturating_sub(1))
        .filter(|&i| {
            let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
            (b > a && b >= c) || (b < a && b <= c)
        })
        .collect();
    extrema
        .windows(2)
        .map(|w| (0.5 * (r[w[0]] + r[w[1]]), 0.5 * (values[w[0]] - values[w[1]]).abs()))
        .collect()
}

/// Decay length ℓ of a fringe envelope E(r) ∝ r^{−(D−1)/2} exp(−r²/(4ℓ²)).
///
/// The geometric factor of a D-dimensional radial wave is removed first;
/// a line through ln E² against r² then has slope −1/(2ℓ²). Returns the
/// length and the fit, or `None` if the envelope does not decay.
pub fn fringe_decay_length(r: &[f64], values: &[f64], dim: u8) -> Option<(f64, LineFit)> {
    let geometric = 0.5 * (dim as f64 - 1.0);
    let (x, y): (Vec<f64>, Vec<f64>) = fringe_amplitudes(r, values)
        .into_iter()
        .filter(|&(rr, a)| rr > 0.0 && a > 0.0)
        .map(|(rr, a)| (rr * rr, 2.0 * (a * rr.powf(geometric)).ln()))
        .unzip();
    let fit = linear_fit(&x, &y)?;
    if !(fit.slope < 0.0) {
        return None;
    }
    Some(((-0.5 / fit.slope).sqrt(), fit))
}

/// Exponential rate from a least-squares line through ln y against t.
pub fn growth_rate(t: &[f64], y: &[f64]) -> Option<LineFit> {
    if y.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(t, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::fit::linspace;
    use proptest::prelude::*;

    #[test]
    fn front_of_linear_ramp() {
        let r = linspace(0.0, 10.0, 11);
        let f: Vec<f64> = r.iter().map(|x| 1.0 - 0.1 * x).collect();
        assert!((front_position(&r, &f, 0.45).unwrap() - 5.5).abs() < 1e-12);
        assert_eq!(front_position(&r, &f, 2.0), None);
        let flat = vec![1.0; 11];
        assert_eq!(front_position(&r, &flat, 0.5), None);
    }

    #[test]
    fn front_takes_outermost_crossing() {
        let r = linspace(0.0, 4.0, 5);
        let f = [1.0, 0.0, 1.0, 0.0, 0.0];
        assert!((front_position(&r, &f, 0.5).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn decay_length_of_gaussian_envelope() {
        let ell = 7.0;
        let r = linspace(0.5, 40.0, 4000);
        let v: Vec<f64> = r
            .iter()
            .map(|&x| 3.0 + x.powf(-0.5) * (-x * x / (4.0 * ell * ell)).exp() * (2.0 * x).cos())
            .collect();
        let (got, fit) = fringe_decay_length(&r, &v, 2).unwrap();
        assert!((got / ell - 1.0).abs() < 0.01, "{got}");
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn growth_rate_of_exponential() {
        let t = linspace(0.0, 5.0, 30);
        let y: Vec<f64> = t.iter().map(|x| 0.3 * (1.7 * x).exp()).collect();
        assert!((growth_rate(&t, &y).unwrap().slope - 1.7).abs() < 1e-12);
        assert!(growth_rate(&t, &[0.0; 30]).is_none());
    }

    proptest! {
        #[test]
        fn autocorrelation_finds_cosine_period(period in 1.0f64..6.0, phase in 0.0f64..6.0) {
            let step = 0.05;
            let v: Vec<f64> = (0..1200).map(|i| (2.0 * std::f64::consts::PI * i as f64 * step / period + phase).cos()).collect();
            let lag = autocorrelation_peak_lag(&v, step).unwrap();
            prop_assert!((lag - period).abs() <= step);
            let ac = autocorrelation(&v);
            prop_assert!((ac[0] - 1.0).abs() < 1e-12);
            prop_assert!(ac.iter().all(|c| c.abs() <= 1.0 + 1e-12));
        }
    }
}
