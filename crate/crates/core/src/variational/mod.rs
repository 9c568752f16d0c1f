//! Variational problems with combined Caputo derivatives and the residuals
//! of their optimality conditions.
//!
//! Two discretizations coexist:
//!
//! * The **discrete functional** (used by [`functional_value`],
//!   [`constraint_values`], [`first_variation`] and the solver) treats the
//!   path as piecewise linear and applies the midpoint rule per cell. The
//!   combined Caputo derivative of the interpolant is evaluated exactly at
//!   cell midpoints, so the functional has an exact gradient and a straight
//!   line is an exact discrete extremal of `∫ (y')²`.
//! * The **node-wise jet** (used by [`el_residual`],
//!   [`transversality_residual`] and [`norm_1_infty`]) samples `y'` by
//!   second-order finite differences and `Dy` by the L1 Caputo operators.
//!   The Euler–Lagrange residual built on it is independent of the solver,
//!   which makes it a certificate rather than a restatement.

mod conditions;
mod discrete;

pub use conditions::{
    check_regularity, el_residual, norm_1_infty, path_jet, slackness_check,
    transversality_residual, PathJet, Transversality, TransversalityMode,
};
pub use discrete::{constraint_values, first_variation, functional_value};
pub(crate) use discrete::Discretization;

use crate::error::{Error, Result};
use crate::fracops::FractionalParams;
use crate::grid::{Grid, SampledPath};
use crate::lagrangian::{LagrangianExpr, Var};

/// Right-endpoint condition of one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndCondition {
    Fixed(f64),
    Free,
    /// `y_l(b) ≤ cap`.
    Capped(f64),
}

/// Fixed left endpoint plus one of three right-endpoint regimes; at most one
/// component may have a non-fixed right end.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    left: Vec<f64>,
    right: Vec<EndCondition>,
}

impl BoundaryConditions {
    pub fn new(left: Vec<f64>, right: Vec<EndCondition>) -> Result<Self> {
        if left.is_empty() || left.len() != right.len() {
            return Err(Error::Problem(format!(
                "boundary data has {} left and {} right values",
                left.len(),
                right.len()
            )));
        }
        if left.iter().any(|v| !v.is_finite()) {
            return Err(Error::Problem("left boundary values must be finite".into()));
        }
        let mut open = 0;
        for end in &right {
            match end {
                EndCondition::Fixed(v) | EndCondition::Capped(v) if !v.is_finite() => {
                    return Err(Error::Problem("right boundary values must be finite".into()));
                }
                EndCondition::Fixed(_) => {}
                EndCondition::Free | EndCondition::Capped(_) => open += 1,
            }
        }
        if open > 1 {
            return Err(Error::Problem(
                "at most one component may have a free or capped right end".into(),
            ));
        }
        Ok(BoundaryConditions { left, right })
    }

    /// Both ends fixed for every component.
    pub fn fixed(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        Self::new(left, right.into_iter().map(EndCondition::Fixed).collect())
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[EndCondition] {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.left.len()
    }

    /// The component whose right end is free or capped, if any.
    pub fn open_end(&self) -> Option<(usize, EndCondition)> {
        self.right
            .iter()
            .enumerate()
            .find(|(_, e)| !matches!(e, EndCondition::Fixed(_)))
            .map(|(i, e)| (i, *e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `∫ G = ξ`.
    Equality,
    /// `∫ G ≤ ξ`.
    Inequality,
}

impl ConstraintKind {
    /// Sign `s` in the augmented integrand `F = L - Σ s_j λ_j G^j`.
    ///
    /// Equality multipliers enter with a minus sign. Inequality multipliers
    /// enter with a plus sign and are non-negative at a minimizer.
    pub fn multiplier_sign(self) -> f64 {
        match self {
            ConstraintKind::Equality => 1.0,
            ConstraintKind::Inequality => -1.0,
        }
    }
}

/// An isoperimetric constraint `∫_a^b G(x, y, y', Dy) dx (= or ≤) target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub integrand: LagrangianExpr,
    pub target: f64,
    pub kind: ConstraintKind,
}

/// Symbolic partial derivatives of one integrand, per component.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Partials {
    pub y: Vec<LagrangianExpr>,
    pub dy: Vec<LagrangianExpr>,
    pub frac: Vec<LagrangianExpr>,
}

impl Partials {
    fn of(e: &LagrangianExpr) -> Self {
        let n = e.arity();
        Partials {
            y: (0..n).map(|i| e.diff(Var::Y(i))).collect(),
            dy: (0..n).map(|i| e.diff(Var::Dy(i))).collect(),
            frac: (0..n).map(|i| e.diff(Var::Frac(i))).collect(),
        }
    }
}

fn uses_frac(e: &LagrangianExpr) -> bool {
    (0..e.arity()).any(|i| e.depends_on(Var::Frac(i)))
}

/// A complete variational problem: minimize `∫ L` on `grid` under boundary
/// conditions and isoperimetric constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    lagrangian: LagrangianExpr,
    params: FractionalParams,
    grid: Grid,
    bc: BoundaryConditions,
    constraints: Vec<Constraint>,
    partials: Partials,
    constraint_partials: Vec<Partials>,
}

impl ProblemSpec {
    pub fn new(
        lagrangian: LagrangianExpr,
        params: FractionalParams,
        grid: Grid,
        bc: BoundaryConditions,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let dim = lagrangian.arity();
        if bc.dim() != dim {
            return Err(Error::Problem(format!(
                "Lagrangian has N = {dim} but boundary data has {} components",
                bc.dim()
            )));
        }
        for (j, c) in constraints.iter().enumerate() {
            if c.integrand.arity() != dim {
                return Err(Error::Problem(format!(
                    "constraint {} has N = {}, Lagrangian has N = {dim}",
                    j + 1,
                    c.integrand.arity()
                )));
            }
            if !c.target.is_finite() {
                return Err(Error::Problem(format!("constraint {} target is not finite", j + 1)));
            }
        }
        if grid.n() < 4 {
            return Err(Error::InvalidGrid(
                "variational problems need at least 4 subintervals".into(),
            ));
        }
        let partials = Partials::of(&lagrangian);
        let constraint_partials = constraints.iter().map(|c| Partials::of(&c.integrand)).collect();
        Ok(ProblemSpec {
            lagrangian,
            params,
            grid,
            bc,
            constraints,
            partials,
            constraint_partials,
        })
    }

    pub fn lagrangian(&self) -> &LagrangianExpr {
        &self.lagrangian
    }

    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bc(&self) -> &BoundaryConditions {
        &self.bc
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Number of path components `N`.
    pub fn dim(&self) -> usize {
        self.lagrangian.arity()
    }

    /// The same problem on another grid.
    pub fn with_grid(&self, grid: Grid) -> Result<Self> {
        Self::new(
            self.lagrangian.clone(),
            self.params,
            grid,
            self.bc.clone(),
            self.constraints.clone(),
        )
    }

    /// The same problem with a different constraint list.
    pub fn with_constraints(&self, constraints: Vec<Constraint>) -> Result<Self> {
        Self::new(
            self.lagrangian.clone(),
            self.params,
            self.grid,
            self.bc.clone(),
            constraints,
        )
    }

    pub(crate) fn partials(&self) -> &Partials {
        &self.partials
    }

    pub(crate) fn constraint_partials(&self) -> &[Partials] {
        &self.constraint_partials
    }

    /// Whether any integrand depends on a fractional derivative.
    pub(crate) fn uses_frac(&self) -> bool {
        uses_frac(&self.lagrangian) || self.constraints.iter().any(|c| uses_frac(&c.integrand))
    }

    pub(crate) fn check_path(&self, y: &SampledPath) -> Result<()> {
        if y.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if y.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "path has {} components, problem has N = {}",
                y.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Lagrange multipliers, one per constraint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiplierSet {
    values: Vec<f64>,
}

impl MultiplierSet {
    pub fn new(values: Vec<f64>) -> Self {
        MultiplierSet { values }
    }

    pub fn zeros(r: usize) -> Self {
        MultiplierSet { values: vec![0.0; r] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Optimality residuals of a candidate path.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    /// Euler–Lagrange residual per component at every node. Endpoint values
    /// are reported but not asserted.
    pub el: Vec<Vec<f64>>,
    /// Inclusive node range `[⌈0.05 n⌉, ⌊0.95 n⌋]` on which `el` is asserted.
    pub window: (usize, usize),
    pub transversality: Option<Transversality>,
    /// `G^j(y) - ξ_j`.
    pub constraint_violations: Vec<f64>,
    /// `λ_j (ξ_j - G^j(y))`.
    pub slackness: Vec<f64>,
}

impl Residual {
    /// Largest `|el|` over the assertion window, per component.
    pub fn el_max_per_component(&self) -> Vec<f64> {
        let (lo, hi) = self.window;
        self.el
            .iter()
            .map(|c| c[lo..=hi].iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect()
    }

    /// Largest `|el|` over the assertion window and all components.
    pub fn el_max(&self) -> f64 {
        self.el_max_per_component().into_iter().fold(0.0, f64::max)
    }

    /// Largest constraint violation magnitude; inequality constraints only
    /// count when exceeded.
    pub fn max_violation(&self, constraints: &[Constraint]) -> f64 {
        self.constraint_violations
            .iter()
            .zip(constraints)
            .map(|(v, c)| match c.kind {
                ConstraintKind::Equality => v.abs(),
                ConstraintKind::Inequality => v.max(0.0),
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn assertion_window(n: usize) -> (usize, usize) {
    let lo = (0.05 * n as f64).ceil() as usize;
    let hi = (0.95 * n as f64).floor() as usize;
    (lo.max(1), hi.min(n - 1))
}
