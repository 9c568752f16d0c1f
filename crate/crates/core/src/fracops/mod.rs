//! Discretized fractional operators on sampled functions.
//!
//! * Riemann–Liouville integrals use the product-trapezoidal rule: the
//!   piecewise-linear interpolant of `f` is integrated exactly against the
//!   weakly singular kernel.
//! * Caputo derivatives use the L1 scheme: the piecewise-linear interpolant is
//!   differentiated inside the kernel integral, again with exact weights.
//! * Riemann–Liouville derivatives differentiate the discrete integral of
//!   order `1 - α` with second-order finite differences.
//!
//! Right-sided operators are the node reversal of the left-sided ones applied
//! to the reversed samples, so reflection duality holds exactly. Each output
//! node is a fixed-order sum, independent of any parallel evaluation.
//!
//! The left Caputo value at node 0 (and the right value at node `n`) is 0,
//! the empty-integral limit. Riemann–Liouville derivatives of functions not
//! vanishing at the base point are singular there; the endpoint value is
//! reported but carries no accuracy guarantee.

mod midpoint;
mod parts;
mod weights;

pub use midpoint::MidpointCaputo;
pub use parts::{check_combined_parts, check_rlfi_parts, CombinedParts};

use crate::error::{Error, Result};
use crate::grid::{derivative, SampledPath};
use crate::specfun::gamma;

/// Parameters `(α, β, γ)` of the combined derivative
/// `γ · (left Caputo of order α) + (1 - γ) · (right Caputo of order β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl FractionalParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!("beta must lie in (0, 1), got {beta}")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Domain(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        Ok(FractionalParams { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

fn check_integral_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "fractional integral order must lie in (0, 1], got {alpha}"
        )))
    }
}

fn check_derivative_order(alpha: f64, path: &SampledPath) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "fractional derivative order must lie in (0, 1), got {alpha}"
        )));
    }
    if path.grid().n() < 4 {
        return Err(Error::InvalidGrid(
            "fractional derivatives need at least 4 subintervals".into(),
        ));
    }
    Ok(())
}

fn componentwise(path: &SampledPath, op: impl Fn(&[f64]) -> Vec<f64>) -> SampledPath {
    let components = path.components().iter().map(|c| op(c)).collect();
    SampledPath::from_parts_unchecked(*path.grid(), components)
}

fn reflected(values: &[f64], op: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let reversed: Vec<f64> = values.iter().rev().copied().collect();
    let mut out = op(&reversed);
    out.reverse();
    out
}

/// Left RLFI at every node by the product-trapezoidal rule.
pub(crate) fn left_rlfi_values(f: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let scale = h.powf(alpha) / gamma(alpha + 2.0).expect("alpha + 2 > 0");
    let inner = weights::rlfi_inner(alpha, n);
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let mut acc = weights::rlfi_first(alpha, k) * f[0];
        for j in 1..k {
            acc += inner[k - j] * f[j];
        }
        acc += f[k];
        out[k] = scale * acc;
    }
    out
}

/// Left Caputo derivative at every node by the L1 scheme.
pub(crate) fn left_caputo_values(f: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let scale = h.powf(-alpha) / gamma(2.0 - alpha).expect("2 - alpha > 0");
    let b = weights::l1(alpha, n);
    let jumps: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        let mut acc = 0.0;
        for j in 0..k {
            acc += b[k - 1 - j] * jumps[j];
        }
        out[k] = scale * acc;
    }
    out
}

pub(crate) fn left_rlfd_values(f: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    derivative(&left_rlfi_values(f, h, 1.0 - alpha), h)
}

pub(crate) fn right_rlfi_values(f: &[f64], h: f64, alpha: f64) -> Vec<f64> {
    reflected(f, |v| left_rlfi_values(v, h, alpha))
}

/// Left Riemann–Liouville integral `(1/Γ(α)) ∫_a^x (x-t)^{α-1} f(t) dt`.
pub fn left_rlfi(f: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_integral_order(alpha)?;
    let h = f.grid().step();
    Ok(componentwise(f, |c| left_rlfi_values(c, h, alpha)))
}

/// Right Riemann–Liouville integral `(1/Γ(α)) ∫_x^b (t-x)^{α-1} f(t) dt`.
pub fn right_rlfi(f: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_integral_order(alpha)?;
    let h = f.grid().step();
    Ok(componentwise(f, |c| right_rlfi_values(c, h, alpha)))
}

/// Left Caputo derivative `(1/Γ(1-α)) ∫_a^x (x-t)^{-α} f'(t) dt`.
pub fn left_caputo(f: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_derivative_order(alpha, f)?;
    let h = f.grid().step();
    Ok(componentwise(f, |c| left_caputo_values(c, h, alpha)))
}

/// Right Caputo derivative `-(1/Γ(1-α)) ∫_x^b (t-x)^{-α} f'(t) dt`.
pub fn right_caputo(f: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_derivative_order(alpha, f)?;
    let h = f.grid().step();
    Ok(componentwise(f, |c| {
        reflected(c, |v| left_caputo_values(v, h, alpha))
    }))
}

/// Left Riemann–Liouville derivative `d/dx I_left^{1-α} f`.
pub fn left_rlfd(f: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_derivative_order(alpha, f)?;
    let h = f.grid().step();
    Ok(componentwise(f, |c| left_rlfd_values(c, h, alpha)))
}

/// Right Riemann–Liouville derivative `-d/dx I_right^{1-α} f`.
pub fn right_rlfd(f: &SampledPath, alpha: f64) -> Result<SampledPath> {
    check_derivative_order(alpha, f)?;
    let h = f.grid().step();
    Ok(componentwise(f, |c| {
        reflected(c, |v| left_rlfd_values(v, h, alpha))
    }))
}

fn blend(u: &SampledPath, cu: f64, v: &SampledPath, cv: f64) -> SampledPath {
    let components = u
        .components()
        .iter()
        .zip(v.components())
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| cu * x + cv * y).collect())
        .collect();
    SampledPath::from_parts_unchecked(*u.grid(), components)
}

/// Combined Caputo derivative, applied component-wise.
///
/// At `γ = 1` and `γ = 0` this is literally the one-sided operator.
pub fn combined_caputo(f: &SampledPath, params: &FractionalParams) -> Result<SampledPath> {
    let g = params.gamma();
    if g == 1.0 {
        return left_caputo(f, params.alpha());
    }
    if g == 0.0 {
        return right_caputo(f, params.beta());
    }
    let left = left_caputo(f, params.alpha())?;
    let right = right_caputo(f, params.beta())?;
    Ok(blend(&left, g, &right, 1.0 - g))
}

/// The Riemann–Liouville operator `(1-γ) · left RLFD of order β + γ · right
/// RLFD of order α` that acts on `∂L/∂(Dy)` in the Euler–Lagrange equation.
pub fn dual_combined_rl(g: &SampledPath, params: &FractionalParams) -> Result<SampledPath> {
    let w = params.gamma();
    if w == 1.0 {
        return right_rlfd(g, params.alpha());
    }
    if w == 0.0 {
        return left_rlfd(g, params.beta());
    }
    let left = left_rlfd(g, params.beta())?;
    let right = right_rlfd(g, params.alpha())?;
    Ok(blend(&left, 1.0 - w, &right, w))
}
