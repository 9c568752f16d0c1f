//! Numerical checks of the fractional integration-by-parts formulas.

use super::{combined_caputo, dual_combined_rl, left_rlfi, right_rlfi, FractionalParams};
use crate::error::{Error, Result};
use crate::grid::SampledPath;

fn check_pair(f: &SampledPath, g: &SampledPath) -> Result<()> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    if f.dim() != 1 || g.dim() != 1 {
        return Err(Error::Shape(format!(
            "integration by parts needs single-component paths, got {} and {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(())
}

fn inner(f: &SampledPath, u: &[f64], v: &[f64]) -> f64 {
    let product: Vec<f64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
    f.grid().trapezoid(&product)
}

/// `|∫ g · (left RLFI^α f) - ∫ f · (right RLFI^α g)|`, both sides by the
/// trapezoidal rule over the node values.
pub fn check_rlfi_parts(f: &SampledPath, g: &SampledPath, alpha: f64) -> Result<f64> {
    check_pair(f, g)?;
    let lf = left_rlfi(f, alpha)?;
    let rg = right_rlfi(g, alpha)?;
    let lhs = inner(f, g.component(0), lf.component(0));
    let rhs = inner(f, f.component(0), rg.component(0));
    Ok((lhs - rhs).abs())
}

/// The pieces of the combined-operator integration-by-parts identity
/// `lhs = rhs_integral + boundary_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedParts {
    /// `∫ g · (combined Caputo of f)`.
    pub lhs: f64,
    /// `∫ f · (dual Riemann–Liouville operator of g)`.
    pub rhs_integral: f64,
    /// `-(1-γ) f(b) (left RLFI^{1-β} g)(b) - γ f(a) (right RLFI^{1-α} g)(a)`.
    pub boundary_term: f64,
    /// `|lhs - rhs_integral - boundary_term|`.
    pub residual: f64,
}

pub fn check_combined_parts(
    f: &SampledPath,
    g: &SampledPath,
    params: &FractionalParams,
) -> Result<CombinedParts> {
    check_pair(f, g)?;
    let n = f.grid().n();
    let cf = combined_caputo(f, params)?;
    let dg = dual_combined_rl(g, params)?;
    let lhs = inner(f, g.component(0), cf.component(0));
    let rhs_integral = inner(f, f.component(0), dg.component(0));

    let w = params.gamma();
    let mut boundary_term = 0.0;
    if w < 1.0 {
        let ig = left_rlfi(g, 1.0 - params.beta())?;
        boundary_term -= (1.0 - w) * f.at(0, n) * ig.at(0, n);
    }
    if w > 0.0 {
        let ig = right_rlfi(g, 1.0 - params.alpha())?;
        boundary_term -= w * f.at(0, 0) * ig.at(0, 0);
    }
    Ok(CombinedParts {
        lhs,
        rhs_integral,
        boundary_term,
        residual: (lhs - rhs_integral - boundary_term).abs(),
    })
}
