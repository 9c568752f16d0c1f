//! Scalar special functions: Gamma, the one-parameter Mittag-Leffler function
//! and the complementary error function.
//!
//! All functions are pure and thread-safe.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real `x`, with a pole error at the non-positive integers.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma of NaN".into()));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series = LANCZOS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64));
    // split the power so t^(x+1/2) does not overflow before e^-t brings it back
    let half_power = t.powf(0.5 * (x + 0.5));
    SQRT_2PI * half_power * (half_power * (-t).exp()) * series
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x));
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let series = LANCZOS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + i as f64));
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// One-parameter Mittag-Leffler function `E_α(z) = Σ z^k / Γ(αk + 1)` for
/// `α ∈ (0, 1]` and real `z`.
///
/// Uses the power series except for `z < -1` with `α < 1`, where the series
/// cancels catastrophically; there the Laplace-type representation
/// `E_α(-x) = sin(απ)/(απ) ∫₀^∞ exp(-x^{1/α} v^{1/α}) / (v² + 2v cos(απ) + 1) dv`
/// is integrated adaptively. `E_1` is `exp`. Large positive `z` overflows
/// with [`Error::NotConverged`].
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "Mittag-Leffler order must lie in (0, 1], got {alpha}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain(format!("Mittag-Leffler argument {z}")));
    }
    if alpha == 1.0 {
        return Ok(z.exp());
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z < -1.0 {
        return mittag_leffler_negative(alpha, -z);
    }
    match mittag_leffler_series(alpha, z) {
        // small orders decay too slowly near z = -1
        Err(Error::NotConverged(_)) if z < 0.0 => mittag_leffler_negative(alpha, -z),
        other => other,
    }
}

fn mittag_leffler_series(alpha: f64, z: f64) -> Result<f64> {
    const MAX_TERMS: usize = 10_000;
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut sum = 1.0;
    for k in 1..MAX_TERMS {
        let arg = alpha * k as f64 + 1.0;
        let magnitude = if arg < 170.0 {
            z.abs().powi(k as i32) / gamma_unchecked(arg)
        } else {
            (k as f64 * ln_abs_z - ln_gamma_positive(arg)).exp()
        };
        let term = if negative && k % 2 == 1 {
            -magnitude
        } else {
            magnitude
        };
        sum += term;
        if !sum.is_finite() {
            return Err(Error::NotConverged(format!(
                "E_{alpha}({z}) overflows double precision"
            )));
        }
        // Γ is increasing past its minimum near 1.46, so terms only shrink from here on
        if arg > 2.0 && magnitude < 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NotConverged(format!(
        "Mittag-Leffler series for E_{alpha}({z}) needs more than {MAX_TERMS} terms"
    )))
}

fn mittag_leffler_negative(alpha: f64, x: f64) -> Result<f64> {
    let inv = 1.0 / alpha;
    let scale = x.powf(inv);
    let (sin, cos) = (alpha * PI).sin_cos();
    // v² + 2v·cos + 1 written as a sum of squares; the expanded form cancels near v = 1 when α → 1
    let integrand = move |v: f64| (-scale * v.powf(inv)).exp() / ((v + cos).powi(2) + sin * sin);
    // beyond this point the exponential factor underflows
    let cutoff = (745.0 / scale).powf(alpha);
    let breaks: Vec<f64> = if cutoff > 1.0 {
        vec![0.0, 1.0, cutoff]
    } else {
        vec![0.0, cutoff]
    };
    let q = quad::integrate_with_breaks(integrand, &breaks, 1e-300, 1e-14)?;
    Ok(sin / (alpha * PI) * q.value)
}

/// Complementary error function `erfc(z) = 2/√π ∫_z^∞ e^{-t²} dt`.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z < 2.0 {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// Error function, `1 - erfc(z)`.
pub fn erf(z: f64) -> f64 {
    if z < 0.0 {
        return -erf(-z);
    }
    if z < 2.0 {
        erf_series(z)
    } else {
        1.0 - erfc_continued_fraction(z)
    }
}

// erf(z) = 2/√π e^{-z²} Σ 2^k z^{2k+1} / (1·3·…·(2k+1)); all terms positive.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= 2.0 * z2 / (2.0 * k + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-z2).exp() * sum
}

// erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …)))), modified Lentz.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (f * PI.sqrt())
}
