//! Direct method: minimize the discrete functional over the node values of
//! the path.
//!
//! Decision variables are the interior node values of every component plus
//! the right endpoint of a free or capped component. Constraints are handled
//! by an augmented-Lagrangian outer loop around an L-BFGS inner solve whose
//! initial inverse Hessian is the inverse of the discrete `H¹` Gram matrix
//! (stiffness plus mass), which removes the `1/h²` conditioning of the
//! derivative terms.

mod lbfgs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::SampledPath;
use crate::variational::{
    check_regularity, el_residual, ConstraintKind, Discretization, EndCondition, MultiplierSet,
    ProblemSpec, Residual,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Total L-BFGS iterations across all outer iterations.
    pub max_iterations: usize,
    /// Stopping threshold on the projected gradient, measured as
    /// `max |g_k| / h` over interior variables and `|g_n|` at an open end.
    /// `None` picks 1e-8 for classical problems and 1e-6 when any integrand
    /// uses a fractional derivative.
    pub gradient_tolerance: Option<f64>,
    pub constraint_tolerance: f64,
    pub penalty_initial: f64,
    pub penalty_growth: f64,
    pub penalty_max: f64,
    pub memory: usize,
    pub seed: u64,
    /// Amplitude of a seeded uniform perturbation of the initial guess.
    pub perturbation: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 5000,
            gradient_tolerance: None,
            constraint_tolerance: 1e-8,
            penalty_initial: 10.0,
            penalty_growth: 10.0,
            penalty_max: 1e8,
            memory: 10,
            seed: 0,
            perturbation: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gradient_tolerance", self.gradient_tolerance.unwrap_or(1.0)),
            ("constraint_tolerance", self.constraint_tolerance),
            ("penalty_initial", self.penalty_initial),
            ("penalty_max", self.penalty_max),
            ("perturbation", self.perturbation.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Problem(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.penalty_growth > 1.0) {
            return Err(Error::Problem(format!(
                "penalty_growth must exceed 1, got {}",
                self.penalty_growth
            )));
        }
        if self.max_iterations == 0 || self.memory == 0 {
            return Err(Error::Problem(
                "max_iterations and memory must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn gradient_tolerance_for(&self, problem: &ProblemSpec) -> f64 {
        self.gradient_tolerance
            .unwrap_or(if problem.uses_frac() { 1e-6 } else { 1e-8 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub path: SampledPath,
    pub multipliers: MultiplierSet,
    /// Discrete functional `J(y)` at the returned path.
    pub objective: f64,
    pub residual: Residual,
    pub iterations: usize,
    pub converged: bool,
    /// Stopping-norm value of the Lagrangian gradient at the returned path.
    pub gradient_norm: f64,
    pub warnings: Vec<String>,
    /// Objective after each accepted inner step. For constrained problems
    /// this is the augmented objective and restarts with each outer
    /// iteration.
    pub objective_trace: Vec<f64>,
}

/// Maps decision vectors to paths and back.
struct Layout {
    n: usize,
    dim: usize,
    open: Option<usize>,
    offsets: Vec<usize>,
    len: usize,
}

impl Layout {
    fn new(problem: &ProblemSpec) -> Self {
        let n = problem.grid().n();
        let dim = problem.dim();
        let open = problem.bc().open_end().map(|(l, _)| l);
        let mut offsets = Vec::with_capacity(dim);
        let mut len = 0;
        for i in 0..dim {
            offsets.push(len);
            len += if open == Some(i) { n } else { n - 1 };
        }
        Layout {
            n,
            dim,
            open,
            offsets,
            len,
        }
    }

    fn count(&self, i: usize) -> usize {
        if self.open == Some(i) {
            self.n
        } else {
            self.n - 1
        }
    }

    /// Index of the open endpoint in the decision vector.
    fn endpoint(&self) -> Option<usize> {
        self.open.map(|i| self.offsets[i] + self.n - 1)
    }

    fn to_path(&self, x: &[f64], template: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut y = template.to_vec();
        for (i, c) in y.iter_mut().enumerate() {
            let off = self.offsets[i];
            c[1..=self.count(i)].copy_from_slice(&x[off..off + self.count(i)]);
        }
        y
    }

    fn from_nodes(&self, nodes: &[Vec<f64>]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.len);
        for (i, c) in nodes.iter().enumerate() {
            x.extend_from_slice(&c[1..=self.count(i)]);
        }
        x
    }

    fn masked(&self, nodes: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut out = nodes.to_vec();
        for (i, c) in out.iter_mut().enumerate() {
            c[0] = 0.0;
            if self.open != Some(i) {
                c[self.n] = 0.0;
            }
        }
        out
    }
}

/// Gradient of the discrete functional with respect to every node value,
/// zeroed at nodes fixed by the boundary conditions.
pub fn discrete_gradient(problem: &ProblemSpec, y: &SampledPath) -> Result<SampledPath> {
    problem.check_path(y)?;
    let d = Discretization::new(problem);
    let jet = d.jet(y.components());
    let g = d.gradient(&jet, &[(problem.partials(), 1.0)])?;
    SampledPath::new(*problem.grid(), Layout::new(problem).masked(&g))
}

fn initial_guess(problem: &ProblemSpec, options: &SolveOptions) -> Vec<Vec<f64>> {
    let grid = problem.grid();
    let (a, b) = (grid.a(), grid.b());
    let bc = problem.bc();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    bc.left()
        .iter()
        .zip(bc.right())
        .map(|(&ya, end)| {
            let yb = match *end {
                EndCondition::Fixed(v) => v,
                EndCondition::Free => ya,
                EndCondition::Capped(cap) => ya.min(cap),
            };
            let mut c: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&x| ya + (yb - ya) * (x - a) / (b - a))
                .collect();
            c[grid.n()] = yb;
            if let Some(amp) = options.perturbation {
                let last = grid.n() - usize::from(matches!(end, EndCondition::Fixed(_)));
                for v in &mut c[1..=last] {
                    *v += amp * rng.gen_range(-1.0..1.0);
                }
            }
            c
        })
        .collect()
}

/// Solves `(S/h + M h) z = r` per component, where `S` and `M` are the
/// piecewise-linear stiffness and mass matrices on the decision nodes.
fn h1_preconditioner(layout: &Layout, h: f64) -> impl Fn(&[f64], bool) -> Vec<f64> + '_ {
    move |r: &[f64], endpoint_fixed: bool| {
        let mut z = vec![0.0; r.len()];
        for i in 0..layout.dim {
            let off = layout.offsets[i];
            let mut m = layout.count(i);
            let open = layout.open == Some(i);
            if open && endpoint_fixed {
                m -= 1;
            }
            let diag = |k: usize| {
                if open && !endpoint_fixed && k == m - 1 {
                    1.0 / h + h / 3.0
                } else {
                    2.0 / h + 2.0 * h / 3.0
                }
            };
            let off_diag = -1.0 / h + h / 6.0;
            // Thomas algorithm
            let mut c = vec![0.0; m];
            let mut d = vec![0.0; m];
            let mut denom = diag(0);
            c[0] = off_diag / denom;
            d[0] = r[off] / denom;
            for k in 1..m {
                denom = diag(k) - off_diag * c[k - 1];
                c[k] = off_diag / denom;
                d[k] = (r[off + k] - off_diag * d[k - 1]) / denom;
            }
            z[off + m - 1] = d[m - 1];
            for k in (0..m - 1).rev() {
                z[off + k] = d[k] - c[k] * z[off + k + 1];
            }
        }
        z
    }
}

/// Unconstrained minimization with every right end fixed.
pub fn solve_basic(problem: &ProblemSpec, options: &SolveOptions) -> Result<SolveReport> {
    if problem.bc().open_end().is_some() {
        return Err(Error::Mode("solve_basic needs every endpoint fixed".into()));
    }
    if !problem.constraints().is_empty() {
        return Err(Error::Mode("solve_basic does not take constraints".into()));
    }
    run(problem, options)
}

/// Unconstrained minimization with one free or capped right end.
pub fn solve_free_endpoint(problem: &ProblemSpec, options: &SolveOptions) -> Result<SolveReport> {
    if problem.bc().open_end().is_none() {
        return Err(Error::Mode(
            "solve_free_endpoint needs a free or capped right end".into(),
        ));
    }
    if !problem.constraints().is_empty() {
        return Err(Error::Mode(
            "use solve_isoperimetric for problems with constraints".into(),
        ));
    }
    run(problem, options)
}

/// Constrained minimization by the augmented-Lagrangian method. Any
/// boundary regime is accepted.
pub fn solve_isoperimetric(problem: &ProblemSpec, options: &SolveOptions) -> Result<SolveReport> {
    if problem.constraints().is_empty() {
        return Err(Error::Mode("solve_isoperimetric needs at least one constraint".into()));
    }
    run(problem, options)
}

/// Picks the solver matching the problem's boundary conditions and
/// constraints.
pub fn solve(problem: &ProblemSpec, options: &SolveOptions) -> Result<SolveReport> {
    run(problem, options)
}

fn run(problem: &ProblemSpec, options: &SolveOptions) -> Result<SolveReport> {
    options.validate()?;
    let layout = Layout::new(problem);
    let grid = *problem.grid();
    let h = grid.step();
    let disc = Discretization::new(problem);
    let constraints = problem.constraints();
    let r = constraints.len();
    let tol = options.gradient_tolerance_for(problem);

    let template = initial_guess(problem, options);
    let mut x = layout.from_nodes(&template);
    let endpoint = layout.endpoint();
    let bound = match problem.bc().open_end() {
        Some((_, EndCondition::Capped(cap))) => endpoint.map(|index| lbfgs::Bound { index, cap }),
        _ => None,
    };
    let mut weights = vec![1.0 / h; layout.len];
    if let Some(k) = endpoint {
        weights[k] = 1.0;
    }
    let precondition = h1_preconditioner(&layout, h);

    let mut lambda = vec![0.0; r];
    let mut rho = options.penalty_initial;
    let mut previous_violation = f64::INFINITY;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut gradient_norm = f64::INFINITY;
    let max_outer = if r == 0 { 1 } else { 100 };

    for outer in 0..max_outer {
        let lam = lambda.clone();
        let mut objective = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
            let y = layout.to_path(x, &template);
            let jet = disc.jet(&y);
            let mut value = disc.integral(problem.lagrangian(), &jet)?;
            let mut terms = vec![(problem.partials(), 1.0)];
            for (j, c) in constraints.iter().enumerate() {
                let v = disc.integral(&c.integrand, &jet)? - c.target;
                let (penalty, slope) = penalty(c.kind, lam[j], rho, v);
                value += penalty;
                terms.push((&problem.constraint_partials()[j], slope));
            }
            let g = disc.gradient(&jet, &terms)?;
            Ok((value, layout.from_nodes(&g)))
        };
        let config = lbfgs::Config {
            memory: options.memory,
            max_iterations: options.max_iterations - iterations,
            tolerance: tol,
            norm_weights: weights.clone(),
        };
        let out = lbfgs::minimize(&mut objective, x, &precondition, bound, &config)?;
        iterations += out.iterations;
        trace.extend_from_slice(&out.trace);
        x = out.x;
        gradient_norm = out.gradient_norm;

        if r == 0 {
            converged = out.converged;
            break;
        }
        let y = layout.to_path(&x, &template);
        let jet = disc.jet(&y);
        let mut violation: f64 = 0.0;
        for (j, c) in constraints.iter().enumerate() {
            let v = disc.integral(&c.integrand, &jet)? - c.target;
            let (_, slope) = penalty(c.kind, lambda[j], rho, v);
            match c.kind {
                ConstraintKind::Equality => {
                    violation = violation.max(v.abs());
                    lambda[j] = -slope;
                }
                ConstraintKind::Inequality => {
                    violation = violation.max(v.max(-lambda[j] / rho).abs());
                    lambda[j] = slope;
                }
            }
        }
        log::debug!(
            "outer {outer}: violation {violation:e}, rho {rho:e}, lambda {lambda:?}, inner {}",
            out.iterations
        );
        if out.converged && violation <= options.constraint_tolerance {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        if violation > 0.25 * previous_violation {
            rho = (rho * options.penalty_growth).min(options.penalty_max);
        }
        previous_violation = violation;
    }

    let path = SampledPath::new(grid, layout.to_path(&x, &template))?;
    let multipliers = MultiplierSet::new(lambda);
    let objective = disc.integral(problem.lagrangian(), &disc.jet(path.components()))?;
    let residual = el_residual(problem, &path, (r > 0).then_some(&multipliers))?;
    let mut warnings = Vec::new();
    if r > 0 {
        if let Some(w) = regularity_warning(problem, &path, &layout, &residual, &multipliers, options)? {
            warnings.push(w);
        }
    }
    if !converged {
        warnings.push(format!(
            "did not converge in {iterations} iterations (gradient norm {gradient_norm:.3e})"
        ));
        log::info!("{}", warnings.last().unwrap());
    }
    Ok(SolveReport {
        path,
        multipliers,
        objective,
        residual,
        iterations,
        converged,
        gradient_norm,
        warnings,
        objective_trace: trace,
    })
}

/// Augmented-Lagrangian penalty for violation `v = G - ξ` and its
/// derivative with respect to `G`.
fn penalty(kind: ConstraintKind, lambda: f64, rho: f64, v: f64) -> (f64, f64) {
    match kind {
        ConstraintKind::Equality => (-lambda * v + 0.5 * rho * v * v, -lambda + rho * v),
        ConstraintKind::Inequality => {
            let shifted = (lambda + rho * v).max(0.0);
            ((shifted * shifted - lambda * lambda) / (2.0 * rho), shifted)
        }
    }
}

fn regularity_warning(
    problem: &ProblemSpec,
    path: &SampledPath,
    layout: &Layout,
    residual: &Residual,
    multipliers: &MultiplierSet,
    options: &SolveOptions,
) -> Result<Option<String>> {
    let disc = Discretization::new(problem);
    let jet = disc.jet(path.components());
    let directions = problem
        .constraint_partials()
        .iter()
        .map(|p| {
            let g = disc.gradient(&jet, &[(p, 1.0)])?;
            SampledPath::new(*problem.grid(), layout.masked(&g))
        })
        .collect::<Result<Vec<_>>>()?;
    let active = problem
        .constraints()
        .iter()
        .zip(&residual.constraint_violations)
        .zip(multipliers.values())
        .filter(|((c, v), l)| {
            c.kind == ConstraintKind::Equality
                || **l > 0.0
                || v.abs() <= options.constraint_tolerance
        })
        .count();
    let rank = check_regularity(problem, path, &directions)?;
    Ok((rank < active).then(|| {
        format!("regularity rank {rank} is below the number of active constraints {active}")
    }))
}
