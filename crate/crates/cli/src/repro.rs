//! Reproduction of the fractional isoperimetric example family
//! `minimize ∫_0^1 (y' + Dy)² dx` subject to `∫_0^1 (y' + Dy) dx = ξ`,
//! `y(0) = 0`, `y(1) = Y(1)` with `D` the left Caputo derivative of order α.
//! The extremal `Y` satisfies `y' + Dy = ξ` with multiplier `λ = 2ξ`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use fracvar::solver::{solve_isoperimetric, SolveOptions};
use fracvar::{
    BoundaryConditions, Constraint, ConstraintKind, FractionalParams, Grid, LagrangianExpr,
    ProblemSpec,
};

use crate::error::{CliError, Result};
use crate::format::real;
use crate::problem::ProblemFile;
use crate::reference;

/// Largest path error against the reference extremal.
pub const PATH_TOLERANCE: f64 = 5e-3;
/// Largest distance of the recovered multiplier from `2ξ`.
pub const MULTIPLIER_TOLERANCE: f64 = 0.05;
pub const CONSTRAINT_TOLERANCE: f64 = 1e-6;
/// Ten times the Euler–Lagrange threshold of the closed-form check.
pub const EL_TOLERANCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub alpha: f64,
    /// Max-norm distance from the reference extremal.
    pub path_error: f64,
    /// Max-norm distance from the erfc closed form, for `α = 1/2` only.
    pub closed_form_error: Option<f64>,
    pub el_max: f64,
    pub constraint_error: f64,
    pub lambda: f64,
    /// Max-norm distance from the `α → 1` limit `ξ x / 2`.
    pub distance_to_line: f64,
    /// Max-norm distance from the `α → 0` limit `ξ (1 - e^{-x})`.
    pub distance_to_exponential: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproReport {
    pub xi: f64,
    pub n: usize,
    pub rows: Vec<(f64, std::result::Result<Row, String>)>,
}

/// Builds the example problem for one order.
pub fn problem(alpha: f64, xi: f64, n: usize) -> Result<(ProblemSpec, Vec<f64>)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let grid = Grid::new(0.0, 1.0, n)?;
    let reference = reference::extremal(alpha, xi, &grid)?;
    let spec = ProblemSpec::new(
        LagrangianExpr::parse("(dy1+Dy1)^2", 1)?,
        FractionalParams::new(alpha, alpha, 1.0)?,
        grid,
        BoundaryConditions::fixed(vec![0.0], vec![reference[n]])?,
        vec![Constraint {
            integrand: LagrangianExpr::parse("dy1+Dy1", 1)?,
            target: xi,
            kind: ConstraintKind::Equality,
        }],
    )?;
    Ok((spec, reference))
}

fn max_distance(values: &[f64], grid: &Grid, f: impl Fn(f64) -> f64) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(k, v)| (v - f(grid.node(k))).abs())
        .fold(0.0, f64::max)
}

fn row(alpha: f64, xi: f64, n: usize, write_problems: Option<&Path>) -> Result<Row> {
    let (spec, reference) = problem(alpha, xi, n)?;
    if let Some(dir) = write_problems {
        ProblemFile::from_spec(&spec).write(&dir.join(format!("problem_alpha_{alpha}.json")))?;
    }
    let report = solve_isoperimetric(&spec, &SolveOptions::default())?;
    let grid = *spec.grid();
    let y = report.path.component(0);
    let path_error = y
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Row {
        alpha,
        path_error,
        closed_form_error: (alpha == 0.5)
            .then(|| max_distance(y, &grid, |x| reference::half_order(xi, x))),
        el_max: report.residual.el_max(),
        constraint_error: report.residual.constraint_violations[0].abs(),
        lambda: report.multipliers.values()[0],
        distance_to_line: max_distance(y, &grid, |x| reference::order_one_limit(xi, x)),
        distance_to_exponential: max_distance(y, &grid, |x| reference::order_zero_limit(xi, x)),
        converged: report.converged,
        iterations: report.iterations,
    })
}

/// Solves every row concurrently; a failing row is recorded and the others
/// continue.
pub fn reproduce(alphas: &[f64], xi: f64, n: usize, write_problems: Option<&Path>) -> Result<ReproReport> {
    if alphas.is_empty() {
        return Err(CliError::invalid("no orders given"));
    }
    if let Some(bad) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(CliError::invalid(format!("alpha must lie in (0, 1), got {bad}")));
    }
    if n < 200 {
        return Err(CliError::invalid(format!("n must be at least 200, got {n}")));
    }
    if !(xi.is_finite() && xi != 0.0) {
        return Err(CliError::invalid(format!("xi must be finite and non-zero, got {xi}")));
    }
    if let Some(dir) = write_problems {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = alphas
            .iter()
            .map(|&alpha| scope.spawn(move || row(alpha, xi, n, write_problems)))
            .collect();
        alphas
            .iter()
            .zip(handles)
            .map(|(&alpha, h)| {
                let result = match h.join() {
                    Ok(r) => r.map_err(|e| e.to_string()),
                    Err(_) => Err("solver thread panicked".to_string()),
                };
                (alpha, result)
            })
            .collect()
    });
    Ok(ReproReport { xi, n, rows })
}

impl Row {
    pub fn passed(&self, xi: f64) -> bool {
        self.converged
            && self.path_error <= PATH_TOLERANCE
            && self.closed_form_error.map_or(true, |e| e <= PATH_TOLERANCE)
            && (self.lambda - 2.0 * xi).abs() <= MULTIPLIER_TOLERANCE
            && self.constraint_error <= CONSTRAINT_TOLERANCE
            && self.el_max <= EL_TOLERANCE
    }
}

/// A limit-trend comparison between two rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Trend {
    pub description: String,
    pub holds: bool,
}

impl ReproReport {
    fn find(&self, alpha: f64) -> Option<&Row> {
        self.rows
            .iter()
            .find(|(a, _)| *a == alpha)
            .and_then(|(_, r)| r.as_ref().ok())
    }

    /// Rows at α = 0.95 and α = 0.05 should sit closer to the respective
    /// classical limits than the α = 0.5 row. Only trends whose rows are
    /// present are reported.
    pub fn trends(&self) -> Vec<Trend> {
        let mut out = Vec::new();
        if let (Some(mid), Some(high)) = (self.find(0.5), self.find(0.95)) {
            out.push(Trend {
                description: format!(
                    "distance to xi*x/2: alpha=0.95 {} < alpha=0.5 {}",
                    real(high.distance_to_line),
                    real(mid.distance_to_line)
                ),
                holds: high.distance_to_line < mid.distance_to_line,
            });
        }
        if let (Some(mid), Some(low)) = (self.find(0.5), self.find(0.05)) {
            out.push(Trend {
                description: format!(
                    "distance to xi*(1-exp(-x)): alpha=0.05 {} < alpha=0.5 {}",
                    real(low.distance_to_exponential),
                    real(mid.distance_to_exponential)
                ),
                holds: low.distance_to_exponential < mid.distance_to_exponential,
            });
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .all(|(_, r)| r.as_ref().is_ok_and(|r| r.passed(self.xi)))
            && self.trends().iter().all(|t| t.holds)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "xi = {}, n = {}", real(self.xi), self.n);
        let _ = writeln!(
            s,
            "{:>6} {:>11} {:>11} {:>11} {:>11} {:>13} {:>11} {:>11} {:>6}",
            "alpha", "path_err", "erfc_err", "el_max", "constr_err", "lambda", "to_line", "to_exp", "pass"
        );
        let short = |v: f64| format!("{v:.3e}");
        for (alpha, r) in &self.rows {
            match r {
                Ok(r) => {
                    let _ = writeln!(
                        s,
                        "{:>6} {:>11} {:>11} {:>11} {:>11} {:>13} {:>11} {:>11} {:>6}",
                        real(*alpha),
                        short(r.path_error),
                        r.closed_form_error.map_or("-".into(), short),
                        short(r.el_max),
                        short(r.constraint_error),
                        format!("{:.8}", r.lambda),
                        short(r.distance_to_line),
                        short(r.distance_to_exponential),
                        if r.passed(self.xi) { "PASS" } else { "FAIL" }
                    );
                }
                Err(e) => {
                    let _ = writeln!(s, "{:>6} failed: {e}", real(*alpha));
                }
            }
        }
        for t in self.trends() {
            let _ = writeln!(s, "trend {}: {}", if t.holds { "PASS" } else { "FAIL" }, t.description);
        }
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let wrap = |e: csv::Error| CliError::invalid(format!("writing CSV: {e}"));
        w.write_record([
            "alpha",
            "path_error",
            "closed_form_error",
            "el_max",
            "constraint_error",
            "lambda",
            "distance_to_line",
            "distance_to_exponential",
            "converged",
            "pass",
        ])
        .map_err(wrap)?;
        for (alpha, r) in &self.rows {
            let record: Vec<String> = match r {
                Ok(r) => vec![
                    real(*alpha),
                    real(r.path_error),
                    r.closed_form_error.map(real).unwrap_or_default(),
                    real(r.el_max),
                    real(r.constraint_error),
                    real(r.lambda),
                    real(r.distance_to_line),
                    real(r.distance_to_exponential),
                    r.converged.to_string(),
                    r.passed(self.xi).to_string(),
                ],
                Err(_) => {
                    let mut v = vec![real(*alpha)];
                    v.extend(std::iter::repeat(String::new()).take(7));
                    v.extend(["false".to_string(), "false".to_string()]);
                    v
                }
            };
            w.write_record(&record).map_err(wrap)?;
        }
        w.flush().map_err(|e| CliError::invalid(format!("writing CSV: {e}")))
    }
}
