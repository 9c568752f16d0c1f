use nalgebra::DMatrix;

use super::discrete::Discretization;
use super::{assertion_window, constraint_values, EndCondition, MultiplierSet, Partials, ProblemSpec, Residual};
use crate::error::{Error, Result};
use crate::fracops::{combined_caputo, dual_combined_rl, left_rlfi, right_rlfi};
use crate::grid::{derivative, SampledPath};
use crate::lagrangian::{LagrangianExpr, PointBinding};

/// Node-wise samples of `(y, y', Dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathJet {
    pub y: SampledPath,
    pub dy: SampledPath,
    /// Combined Caputo derivative.
    pub frac: SampledPath,
}

impl PathJet {
    fn values(&self, e: &LagrangianExpr) -> Result<Vec<f64>> {
        let grid = self.y.grid();
        let dim = self.y.dim();
        let mut y = vec![0.0; dim];
        let mut dy = vec![0.0; dim];
        let mut frac = vec![0.0; dim];
        (0..grid.len())
            .map(|k| {
                for i in 0..dim {
                    y[i] = self.y.at(i, k);
                    dy[i] = self.dy.at(i, k);
                    frac[i] = self.frac.at(i, k);
                }
                e.eval(&PointBinding {
                    x: grid.node(k),
                    y: &y,
                    dy: &dy,
                    frac: &frac,
                })
                .map_err(|err| Error::at_node(k, err))
            })
            .collect()
    }

    /// `Σ_t w_t e_t` along the jet, `None` if every term is the zero constant.
    fn weighted<'e>(
        &self,
        terms: impl Iterator<Item = (&'e LagrangianExpr, f64)>,
    ) -> Result<Option<Vec<f64>>> {
        let mut acc: Option<Vec<f64>> = None;
        for (e, w) in terms {
            if e.is_zero() || w == 0.0 {
                continue;
            }
            let v = self.values(e)?;
            match acc.as_mut() {
                Some(acc) => acc.iter_mut().zip(&v).for_each(|(s, t)| *s += w * t),
                None => acc = Some(v.into_iter().map(|t| w * t).collect()),
            }
        }
        Ok(acc)
    }
}

/// Samples `y'` by second-order finite differences and `Dy` by the combined
/// Caputo operator.
pub fn path_jet(problem: &ProblemSpec, y: &SampledPath) -> Result<PathJet> {
    problem.check_path(y)?;
    let h = problem.grid().step();
    let dy = SampledPath::new(
        *problem.grid(),
        y.components().iter().map(|c| derivative(c, h)).collect(),
    )?;
    let frac = combined_caputo(y, problem.params())?;
    Ok(PathJet { y: y.clone(), dy, frac })
}

/// Partials of `F = L - Σ s_j λ_j G^j` as weighted terms.
fn augmented_terms<'a>(
    problem: &'a ProblemSpec,
    multipliers: Option<&MultiplierSet>,
) -> Result<Vec<(&'a Partials, f64)>> {
    let r = problem.constraints().len();
    let lambda = match multipliers {
        Some(m) if m.len() == r => m.values().to_vec(),
        Some(m) => {
            return Err(Error::Problem(format!(
                "{} multipliers given for {r} constraints",
                m.len()
            )))
        }
        None if r == 0 => Vec::new(),
        None => {
            return Err(Error::Problem(
                "multipliers are required when the problem has constraints".into(),
            ))
        }
    };
    let mut terms = vec![(problem.partials(), 1.0)];
    for ((c, p), l) in problem
        .constraints()
        .iter()
        .zip(problem.constraint_partials())
        .zip(lambda)
    {
        terms.push((p, -c.kind.multiplier_sign() * l));
    }
    Ok(terms)
}

/// Euler–Lagrange residual
/// `∂_y F - d/dx ∂_{y'} F + D^{β,α}_{1-γ} ∂_{Dy} F` at every node, plus the
/// constraint, slackness and (when an end is open) transversality values.
pub fn el_residual(
    problem: &ProblemSpec,
    y: &SampledPath,
    multipliers: Option<&MultiplierSet>,
) -> Result<Residual> {
    let terms = augmented_terms(problem, multipliers)?;
    let jet = path_jet(problem, y)?;
    let grid = *problem.grid();
    let h = grid.step();
    let mut el = Vec::with_capacity(problem.dim());
    for i in 0..problem.dim() {
        let mut res = vec![0.0; grid.len()];
        if let Some(a) = jet.weighted(terms.iter().map(|(p, w)| (&p.y[i], *w)))? {
            res.iter_mut().zip(a).for_each(|(r, v)| *r += v);
        }
        if let Some(b) = jet.weighted(terms.iter().map(|(p, w)| (&p.dy[i], *w)))? {
            res.iter_mut().zip(derivative(&b, h)).for_each(|(r, v)| *r -= v);
        }
        if let Some(c) = jet.weighted(terms.iter().map(|(p, w)| (&p.frac[i], *w)))? {
            let dual = dual_combined_rl(&SampledPath::scalar(grid, c)?, problem.params())?;
            res.iter_mut().zip(dual.component(0)).for_each(|(r, v)| *r += v);
        }
        el.push(res);
    }

    let (constraint_violations, slackness) = if problem.constraints().is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let values = constraint_values(problem, y)?;
        let lambda = multipliers.map(|m| m.values().to_vec()).unwrap_or_default();
        let violations: Vec<f64> = values
            .iter()
            .zip(problem.constraints())
            .map(|(g, c)| g - c.target)
            .collect();
        let slack = violations.iter().zip(&lambda).map(|(v, l)| -l * v).collect();
        (violations, slack)
    };

    let transversality = match problem.bc().open_end() {
        Some(_) => Some(transversality_residual(problem, y, multipliers)?),
        None => None,
    };

    Ok(Residual {
        el,
        window: assertion_window(grid.n()),
        transversality,
        constraint_violations,
        slackness,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransversalityMode {
    Free,
    Capped { cap: f64, endpoint: f64 },
}

/// The natural boundary condition at `x = b` for the open component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transversality {
    /// Component index `l` (0-based).
    pub component: usize,
    /// `∂_{y'_l} F(b) + γ [I_right^{1-α} ∂_{Dy_l} F](b) - (1-γ) [I_left^{1-β} ∂_{Dy_l} F](b)`.
    pub value: f64,
    /// Derivative of the discrete functional with respect to `y_l(b)`, the
    /// discrete counterpart of `value`.
    pub flux: f64,
    pub mode: TransversalityMode,
}

impl Transversality {
    /// Free end: `|value| ≤ tol`. Capped end: `|value| ≤ tol` while the cap is
    /// slack by more than `tol`, otherwise `value ≤ tol`.
    pub fn satisfied(&self, tol: f64) -> bool {
        match self.mode {
            TransversalityMode::Free => self.value.abs() <= tol,
            TransversalityMode::Capped { cap, endpoint } if endpoint < cap - tol => {
                self.value.abs() <= tol
            }
            TransversalityMode::Capped { .. } => self.value <= tol,
        }
    }
}

pub fn transversality_residual(
    problem: &ProblemSpec,
    y: &SampledPath,
    multipliers: Option<&MultiplierSet>,
) -> Result<Transversality> {
    let (l, end) = problem
        .bc()
        .open_end()
        .ok_or_else(|| Error::Mode("every right endpoint is fixed".into()))?;
    let terms = augmented_terms(problem, multipliers)?;
    let jet = path_jet(problem, y)?;
    let grid = *problem.grid();
    let n = grid.n();
    let params = problem.params();

    let mut value = 0.0;
    if let Some(b) = jet.weighted(terms.iter().map(|(p, w)| (&p.dy[l], *w)))? {
        value += b[n];
    }
    if let Some(c) = jet.weighted(terms.iter().map(|(p, w)| (&p.frac[l], *w)))? {
        let c = SampledPath::scalar(grid, c)?;
        let g = params.gamma();
        if g > 0.0 {
            value += g * right_rlfi(&c, 1.0 - params.alpha())?.at(0, n);
        }
        if g < 1.0 {
            value -= (1.0 - g) * left_rlfi(&c, 1.0 - params.beta())?.at(0, n);
        }
    }

    let d = Discretization::new(problem);
    let cells = d.jet(y.components());
    let flux = d.gradient(&cells, &terms)?[l][n];

    let mode = match end {
        EndCondition::Capped(cap) => TransversalityMode::Capped {
            cap,
            endpoint: y.at(l, n),
        },
        _ => TransversalityMode::Free,
    };
    Ok(Transversality {
        component: l,
        value,
        flux,
        mode,
    })
}

/// Numerical rank of the matrix `a_kl = δG^k(y; h^l)`; singular values at
/// or below `1e-8 · σ_max` count as zero.
pub fn check_regularity(
    problem: &ProblemSpec,
    y: &SampledPath,
    directions: &[SampledPath],
) -> Result<usize> {
    problem.check_path(y)?;
    for h in directions {
        problem.check_path(h)?;
    }
    let r = problem.constraints().len();
    if r == 0 || directions.is_empty() {
        return Ok(0);
    }
    let d = Discretization::new(problem);
    let jet = d.jet(y.components());
    let mut a = DMatrix::<f64>::zeros(r, directions.len());
    for (k, p) in problem.constraint_partials().iter().enumerate() {
        for (l, h) in directions.iter().enumerate() {
            a[(k, l)] = d.variation(&jet, p, h.components())?;
        }
    }
    let sv = a.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > 1e-8 * largest).count())
}

/// `λ_j (ξ_j - G^j(y))` for every constraint.
pub fn slackness_check(
    problem: &ProblemSpec,
    y: &SampledPath,
    multipliers: &MultiplierSet,
) -> Result<Vec<f64>> {
    if multipliers.len() != problem.constraints().len() {
        return Err(Error::Problem(format!(
            "{} multipliers given for {} constraints",
            multipliers.len(),
            problem.constraints().len()
        )));
    }
    let values = constraint_values(problem, y)?;
    Ok(values
        .iter()
        .zip(problem.constraints())
        .zip(multipliers.values())
        .map(|((g, c), l)| l * (c.target - g))
        .collect())
}

/// `max |y| + max |y'| + max |Dy|` over the nodes, with Euclidean norms
/// across components.
pub fn norm_1_infty(problem: &ProblemSpec, y: &SampledPath) -> Result<f64> {
    let jet = path_jet(problem, y)?;
    let max_norm = |p: &SampledPath| {
        (0..p.grid().len())
            .map(|k| (0..p.dim()).map(|i| p.at(i, k).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    };
    Ok(max_norm(&jet.y) + max_norm(&jet.dy) + max_norm(&jet.frac))
}
