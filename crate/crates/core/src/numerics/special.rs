//! Bessel functions J0 and K0 and small helpers for cancellation-prone
//! elementary expressions.
//!
//! J0 uses its power series for x ≤ 8, Miller's backward recurrence with the
//! normalization J0 + 2ΣJ_{2k} = 1 for 8 < x ≤ 25, and the Hankel asymptotic
//! expansion beyond 25. K0 uses its power series for x ≤ 2 and the integral
//! K0(x) = ∫₀^∞ exp(−x cosh s) ds, evaluated by the trapezoid rule, above 2.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

const J0_SERIES_MAX: f64 = 8.0;
const J0_MILLER_MAX: f64 = 25.0;
const K0_SERIES_MAX: f64 = 2.0;

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= J0_SERIES_MAX {
        j0_series(x)
    } else if x <= J0_MILLER_MAX {
        j0_miller(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-3) {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    let start = 2 * ((1.5 * x + 40.0) as usize / 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            next *= 1e-200;
            norm *= 1e-200;
        }
        // `cur` now holds J_{k-1}.
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if k == 1 {
            j0 = cur;
        }
    }
    j0 / (norm + j0)
}

fn j0_asymptotic(x: f64) -> f64 {
    // P and Q series with a_k = Π_{j≤k} (2j−1)² / (k! 8^k).
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if a > last {
            break;
        }
        last = a;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q -= sign * a;
        } else {
            p += sign * a;
        }
        if a < 1e-18 {
            break;
        }
    }
    // cos(x − π/4) and sin(x − π/4) without forming x − π/4.
    let (s, c) = x.sin_cos();
    let cm = (c + s) * FRAC_1_SQRT_2;
    let sm = (s - c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cm - q * sm)
}

/// Modified Bessel function of the second kind of order zero, x > 0.
pub fn bessel_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("K0 requires x > 0, got {x}")));
    }
    Ok(if x <= K0_SERIES_MAX {
        k0_series(x)
    } else {
        k0_integral(x)
    })
}

fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

fn k0_integral(x: f64) -> f64 {
    // Trapezoid rule on an analytic integrand decaying doubly exponentially:
    // the discretization error is of order exp(−π²/h).
    let h = (0.5 / x.sqrt()).min(0.125);
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let s = k as f64 * h;
        let excess = 2.0 * (0.5 * s).sinh().powi(2) * x;
        let term = (-excess).exp();
        sum += term;
        if excess > 45.0 {
            break;
        }
        k += 1;
    }
    (-x).exp() * h * sum
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// sin(x) − x, accurate near zero.
pub fn sin_minus_x(x: f64) -> f64 {
    if x.abs() < 0.25 {
        // −x³/3! + x⁵/5! − ... through x¹³.
        let x2 = x * x;
        let mut term = -x * x2 / 6.0;
        let mut sum = term;
        for n in (5..=13).step_by(2) {
            term *= -x2 / ((n - 1) as f64 * n as f64);
            sum += term;
        }
        sum
    } else {
        x.sin() - x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const J0_TABLE: &[(f64, f64)] = &[
        (0.1, 0.997501562066040032),
        (0.5, 0.93846980724081290423),
        (1.0, 0.76519768655796655145),
        (2.0, 0.22389077914123566805),
        (3.0, -0.26005195490193343762),
        (5.0, -0.17759677131433830435),
        (7.9, 0.19436184484127823969),
        (8.0, 0.17165080713755390609),
        (8.1, 0.1475174540443776703),
        (10.0, -0.2459357644513483352),
        (12.0, 0.047689310796833536624),
        (15.0, -0.014224472826780773234),
        (20.0, 0.16702466434058315473),
        (24.9, 0.083245968353015490053),
        (25.0, 0.096266783275958116174),
        (25.1, 0.10827567149994945198),
        (30.0, -0.086367983581040211336),
        (50.0, 0.055812327669251815005),
        (100.0, 0.019985850304223122424),
        (300.0, -0.033298554876305668007),
        (699.0, 0.021436359010795065183),
    ];

    const K0_TABLE: &[(f64, f64)] = &[
        (1e-06, 13.931442073626419459),
        (0.01, 4.7212447301610949443),
        (0.1, 2.4270690247020165578),
        (0.5, 0.92441907122766586178),
        (1.0, 0.42102443824070833334),
        (1.99, 0.11530176755177679973),
        (2.0, 0.11389387274953343565),
        (2.01, 0.11250436099872804751),
        (3.0, 0.034739504386279248072),
        (5.0, 0.0036910983340425942747),
        (10.0, 0.000017780062316167651811),
        (20.0, 5.7412378153365242927e-10),
        (50.0, 3.4101677497894955139e-23),
        (100.0, 4.6566282291759020189e-45),
        (300.0, 3.7236948548891432633e-132),
        (699.0, 1.2702841880327417612e-305),
    ];

    #[test]
    fn j0_golden_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        for &(x, want) in J0_TABLE {
            let got = bessel_j0(x);
            assert!((got - want).abs() <= 1e-12, "J0({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn j0_is_continuous_at_crossovers() {
        for x0 in [J0_SERIES_MAX, J0_MILLER_MAX] {
            let below = bessel_j0(x0 - 1e-12);
            let above = bessel_j0(x0 + 1e-12);
            assert!((below - above).abs() < 1e-12);
        }
    }

    #[test]
    fn j0_first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if bessel_j0(lo) * bessel_j0(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((0.5 * (lo + hi) - 2.404_825_557_695_773).abs() < 1e-9);
    }

    #[test]
    fn j0_is_bounded_and_even() {
        for i in 0..7000 {
            let x = i as f64 * 0.1;
            let v = bessel_j0(x);
            assert!(v.abs() <= 1.0 + 1e-15);
            assert_eq!(v, bessel_j0(-x));
        }
    }

    #[test]
    fn k0_golden_values() {
        for &(x, want) in K0_TABLE {
            let got = bessel_k0(x).unwrap();
            assert!((got - want).abs() <= 1e-12, "K0({x}) = {got}, want {want}");
            assert!(((got - want) / want).abs() <= 1e-13, "K0({x}) relative");
        }
    }

    #[test]
    fn k0_large_argument_asymptote() {
        let x = 50.0;
        let scaled = bessel_k0(x).unwrap() * x.sqrt() * x.exp();
        assert!((scaled / (PI / 2.0).sqrt() - 1.0).abs() < 0.01);
    }

    #[test]
    fn k0_rejects_non_positive() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k0(-1.0).is_err());
    }

    #[test]
    fn sinc_and_sin_minus_x_are_smooth() {
        for x in [1e-8f64, 1e-5, 1e-4, 0.01, 0.2, 0.2499, 0.25, 0.2501, 1.0, 5.0] {
            let direct = x.sin() / x;
            assert!((sinc(x) - direct).abs() < 1e-15);
            let smx = sin_minus_x(x);
            let series_ref = -x.powi(3) / 6.0 + x.powi(5) / 120.0 - x.powi(7) / 5040.0;
            if x < 0.01 {
                assert!(((smx - series_ref) / series_ref).abs() < 1e-14);
            } else {
                assert!((smx - (x.sin() - x)).abs() < 1e-15 * x.max(1.0));
            }
        }
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sin_minus_x(0.0), 0.0);
    }
}
