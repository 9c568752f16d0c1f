//! Numerical toolkit for fractional variational calculus with combined
//! Caputo derivatives.
//!
//! * [`specfun`]: Gamma, Mittag-Leffler and complementary error functions.
//! * [`fracops`]: Riemann–Liouville and Caputo operators on sampled paths.
//! * [`lagrangian`]: expression language for Lagrangians and constraint integrands.
//! * [`variational`]: discrete functionals and optimality residuals.
//! * [`solver`]: direct minimization with boundary, endpoint and isoperimetric constraints.

pub mod error;
pub mod fracops;
pub mod grid;
pub mod lagrangian;
pub mod quad;
pub mod solver;
pub mod specfun;
pub mod variational;

pub use error::{Error, Result};
pub use fracops::FractionalParams;
pub use grid::{Grid, SampledPath};
pub use lagrangian::{LagrangianExpr, PointBinding, Var};
pub use solver::{solve, SolveOptions, SolveReport};
pub use variational::{
    BoundaryConditions, Constraint, ConstraintKind, EndCondition, MultiplierSet, ProblemSpec,
    Residual,
};
