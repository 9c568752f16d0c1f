//! Closed-form quadrature weights for the product-trapezoidal and L1 rules.
//!
//! The textbook formulas are second differences of powers such as
//! `(s+1)^p - 2 s^p + (s-1)^p`, which lose almost every significant digit
//! for large `s`. They are evaluated here through the binomial series in
//! `u = 1/s` instead, which keeps full relative accuracy.

const SERIES_LIMIT: f64 = 0.5;

/// `Σ_{j ≥ from, j ≡ from (mod step)} C(p, j) u^j`, for `|u| ≤ 1/2`.
fn binomial_tail(p: f64, u: f64, from: usize, step: usize) -> f64 {
    let mut coeff = 1.0;
    let mut power = 1.0;
    for j in 0..from {
        coeff *= (p - j as f64) / (j as f64 + 1.0);
        power *= u;
    }
    let mut sum = 0.0;
    let mut j = from;
    loop {
        let term = coeff * power;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || j > 400 {
            return sum;
        }
        for _ in 0..step {
            coeff *= (p - j as f64) / (j as f64 + 1.0);
            power *= u;
            j += 1;
        }
    }
}

/// `(1+u)^p - 1`.
fn t1(p: f64, u: f64) -> f64 {
    if u.abs() <= SERIES_LIMIT {
        binomial_tail(p, u, 1, 1)
    } else {
        (1.0 + u).powf(p) - 1.0
    }
}

/// `(1+u)^p - 1 - p u`.
fn t2(p: f64, u: f64) -> f64 {
    if u.abs() <= SERIES_LIMIT {
        binomial_tail(p, u, 2, 1)
    } else {
        (1.0 + u).powf(p) - 1.0 - p * u
    }
}

/// Product-trapezoid weight of an interior node `s` cells behind the
/// evaluation node: `(s+1)^p - 2 s^p + (s-1)^p` with `p = α + 1`.
///
/// Entry 0 is unused and left at 0.
pub(crate) fn rlfi_inner(alpha: f64, n: usize) -> Vec<f64> {
    let p = alpha + 1.0;
    let mut c = vec![0.0; n + 1];
    for (s, slot) in c.iter_mut().enumerate().skip(1) {
        let sf = s as f64;
        *slot = if s == 1 {
            2f64.powf(p) - 2.0
        } else {
            2.0 * sf.powf(p) * binomial_tail(p, 1.0 / sf, 2, 2)
        };
    }
    c
}

/// Product-trapezoid weight of the base node for evaluation node `k ≥ 1`:
/// `(k-1)^p - (k-p) k^α`.
pub(crate) fn rlfi_first(alpha: f64, k: usize) -> f64 {
    let p = alpha + 1.0;
    let kf = k as f64;
    kf.powf(p) * t2(p, -1.0 / kf)
}

/// L1 weights `b_m = (m+1)^{1-α} - m^{1-α}` for `m = 0..n-1`.
pub(crate) fn l1(alpha: f64, n: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..n)
        .map(|m| {
            if m == 0 {
                1.0
            } else {
                let mf = m as f64;
                mf.powf(p) * t1(p, 1.0 / mf)
            }
        })
        .collect()
}

/// Weights of the Caputo derivative of a piecewise-linear function at cell
/// midpoints: `e_0 = (1/2)^{1-α}`, `e_q = (q+1/2)^{1-α} - (q-1/2)^{1-α}`.
pub(crate) fn midpoint(alpha: f64, n: usize) -> Vec<f64> {
    let p = 1.0 - alpha;
    (0..n)
        .map(|q| {
            if q == 0 {
                0.5f64.powf(p)
            } else {
                let base = q as f64 - 0.5;
                base.powf(p) * t1(p, 1.0 / base)
            }
        })
        .collect()
}
