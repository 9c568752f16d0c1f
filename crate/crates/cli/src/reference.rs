//! Reference extremal of the fractional isoperimetric example
//! `minimize ∫ (y' + Dy)² subject to ∫ (y' + Dy) = ξ`, `y(0) = 0`.
//!
//! The extremal solves `y' + Dy = ξ` and is the convolution
//! `y(x) = ξ ∫_0^x E_{1-α}(-(x-t)^{1-α}) dt = ξ ∫_0^x E_{1-α}(-s^{1-α}) ds`.
//! The second form is a running integral, so the whole path costs one
//! adaptive quadrature per grid cell.

use fracvar::quad::integrate;
use fracvar::specfun::{erfc, mittag_leffler};
use fracvar::{Grid, Result};

fn kernel(alpha: f64, s: f64) -> Result<f64> {
    mittag_leffler(1.0 - alpha, -s.powf(1.0 - alpha))
}

/// Node values of the reference extremal on `grid` (which must start at 0).
pub fn extremal(alpha: f64, xi: f64, grid: &Grid) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..grid.len() {
        let (lo, hi) = (grid.node(k - 1), grid.node(k));
        let failure = std::cell::RefCell::new(None);
        let q = integrate(
            |s| {
                kernel(alpha, s).unwrap_or_else(|e| {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                })
            },
            lo,
            hi,
            1e-15,
            1e-13,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        acc += q?.value;
        out.push(xi * acc);
    }
    Ok(out)
}

/// Value of the reference extremal at one point.
pub fn extremal_at(alpha: f64, xi: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(xi * integrate(|s| kernel(alpha, s).unwrap_or(f64::NAN), 0.0, x, 1e-15, 1e-13)?.value)
}

/// Closed form at `α = 1/2`: `ξ (e^x erfc(√x) + 2√(x/π) - 1)`.
pub fn half_order(xi: f64, x: f64) -> f64 {
    xi * (x.exp() * erfc(x.sqrt()) + 2.0 * (x / std::f64::consts::PI).sqrt() - 1.0)
}

/// Limit `α → 1`: the scaled classical minimizer `ξ x / 2`.
pub fn order_one_limit(xi: f64, x: f64) -> f64 {
    0.5 * xi * x
}

/// Limit `α → 0`: the classical extremal `ξ (1 - e^{-x})`.
pub fn order_zero_limit(xi: f64, x: f64) -> f64 {
    xi * (1.0 - (-x).exp())
}
