//! Quadrature oracle shared by the integration tests.
//!
//! Double-exponential (tanh-sinh) rule on a finite interval. The integrand
//! receives the abscissa together with its distances to both endpoints,
//! computed without cancellation, so kernels like `(x - t)^{-α}` can be
//! evaluated accurately next to their singularity.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let node = |t: f64| {
        let s = FRAC_PI_2 * t.sinh();
        let c = FRAC_PI_2 * t.cosh();
        // 1 - tanh(s) = 2 / (1 + e^{2s}) keeps the distance exact near ±1
        let to_right = half * 2.0 / (1.0 + (2.0 * s).exp());
        let to_left = half * 2.0 / (1.0 + (-2.0 * s).exp());
        let w = half * c / s.cosh().powi(2);
        (mid + half * s.tanh(), to_left, to_right, w)
    };
    let eval = |t: f64| {
        let (x, l, r, w) = node(t);
        if l <= 0.0 || r <= 0.0 || !w.is_finite() || w == 0.0 {
            0.0
        } else {
            w * f(x, l, r)
        }
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > 6.5 {
            break;
        }
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = h * sum;
    for _ in 0..10 {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > 6.5 {
                break;
            }
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = h * sum;
        if (next - estimate).abs() <= 1e-15 * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

pub fn gamma(x: f64) -> f64 {
    fracvar::specfun::gamma(x).unwrap()
}

/// Left Caputo derivative of order `alpha` at `x` from the defining
/// integral, given the derivative `df` of the sampled function on `[a, x]`.
pub fn left_caputo_oracle(df: impl Fn(f64) -> f64, alpha: f64, a: f64, x: f64) -> f64 {
    tanh_sinh(|t, _, r| r.powf(-alpha) * df(t), a, x) / gamma(1.0 - alpha)
}

/// Right Caputo derivative `-1/Γ(1-α) ∫_x^b (t - x)^{-α} f'(t) dt`.
pub fn right_caputo_oracle(df: impl Fn(f64) -> f64, alpha: f64, x: f64, b: f64) -> f64 {
    -tanh_sinh(|t, l, _| l.powf(-alpha) * df(t), x, b) / gamma(1.0 - alpha)
}

/// Left Riemann–Liouville integral of order `alpha` at `x`.
pub fn left_rlfi_oracle(f: impl Fn(f64) -> f64, alpha: f64, a: f64, x: f64) -> f64 {
    tanh_sinh(|t, _, r| r.powf(alpha - 1.0) * f(t), a, x) / gamma(alpha)
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
