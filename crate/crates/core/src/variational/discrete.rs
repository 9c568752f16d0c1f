//! The discrete functional: piecewise-linear path, midpoint rule per cell.

use super::{Partials, ProblemSpec};
use crate::error::{Error, Result};
use crate::fracops::MidpointCaputo;
use crate::grid::{compensated_sum, SampledPath};
use crate::lagrangian::{LagrangianExpr, PointBinding};

/// Cell-midpoint values of `(x, y, y', Dy)`, component-major.
pub(crate) struct CellJet {
    x: Vec<f64>,
    y: Vec<Vec<f64>>,
    dy: Vec<Vec<f64>>,
    frac: Vec<Vec<f64>>,
}

/// Per-problem state reused across many evaluations of the discrete
/// functional.
pub(crate) struct Discretization<'p> {
    problem: &'p ProblemSpec,
    caputo: Option<MidpointCaputo>,
}

impl<'p> Discretization<'p> {
    pub fn new(problem: &'p ProblemSpec) -> Self {
        let caputo = problem
            .uses_frac()
            .then(|| MidpointCaputo::new(problem.grid(), problem.params()));
        Discretization { problem, caputo }
    }

    pub fn jet(&self, y: &[Vec<f64>]) -> CellJet {
        let grid = self.problem.grid();
        let n = grid.n();
        let h = grid.step();
        let x = (0..n).map(|m| grid.midpoint(m)).collect();
        let mid = y
            .iter()
            .map(|c| c.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
            .collect();
        let dy = y
            .iter()
            .map(|c| c.windows(2).map(|w| (w[1] - w[0]) / h).collect())
            .collect();
        let frac = match &self.caputo {
            Some(op) => y.iter().map(|c| op.apply(c)).collect(),
            None => vec![vec![0.0; n]; y.len()],
        };
        CellJet { x, y: mid, dy, frac }
    }

    /// Integrand values at every cell midpoint.
    pub fn values(&self, e: &LagrangianExpr, jet: &CellJet) -> Result<Vec<f64>> {
        let dim = jet.y.len();
        let mut y = vec![0.0; dim];
        let mut dy = vec![0.0; dim];
        let mut frac = vec![0.0; dim];
        let mut out = Vec::with_capacity(jet.x.len());
        for (m, &x) in jet.x.iter().enumerate() {
            for i in 0..dim {
                y[i] = jet.y[i][m];
                dy[i] = jet.dy[i][m];
                frac[i] = jet.frac[i][m];
            }
            let v = e
                .eval(&PointBinding {
                    x,
                    y: &y,
                    dy: &dy,
                    frac: &frac,
                })
                .map_err(|err| Error::AtCell {
                    cell: m,
                    source: Box::new(err),
                })?;
            out.push(v);
        }
        Ok(out)
    }

    /// Midpoint-rule integral `h Σ_m e(cell m)`.
    pub fn integral(&self, e: &LagrangianExpr, jet: &CellJet) -> Result<f64> {
        Ok(self.problem.grid().step() * compensated_sum(self.values(e, jet)?))
    }

    /// Node gradient of `Σ_t w_t ∫ E_t` where `E_t` has partials `terms[t].0`
    /// and weight `terms[t].1`.
    pub fn gradient(&self, jet: &CellJet, terms: &[(&Partials, f64)]) -> Result<Vec<Vec<f64>>> {
        let grid = self.problem.grid();
        let n = grid.n();
        let h = grid.step();
        let dim = jet.y.len();
        let mut out = Vec::with_capacity(dim);
        for i in 0..dim {
            let a = self.weighted(jet, terms.iter().map(|(p, w)| (&p.y[i], *w)))?;
            let b = self.weighted(jet, terms.iter().map(|(p, w)| (&p.dy[i], *w)))?;
            let c = self.weighted(jet, terms.iter().map(|(p, w)| (&p.frac[i], *w)))?;
            let mut g = vec![0.0; n + 1];
            if let Some(a) = a {
                for m in 0..n {
                    g[m] += 0.5 * h * a[m];
                    g[m + 1] += 0.5 * h * a[m];
                }
            }
            if let Some(b) = b {
                for m in 0..n {
                    g[m] -= b[m];
                    g[m + 1] += b[m];
                }
            }
            if let (Some(c), Some(op)) = (c, &self.caputo) {
                for (gk, t) in g.iter_mut().zip(op.apply_transpose(&c)) {
                    *gk += h * t;
                }
            }
            out.push(g);
        }
        Ok(out)
    }

    /// `Σ_t w_t · (values of e_t)`, or `None` when every `e_t` is the zero
    /// constant.
    fn weighted<'e>(
        &self,
        jet: &CellJet,
        terms: impl Iterator<Item = (&'e LagrangianExpr, f64)>,
    ) -> Result<Option<Vec<f64>>> {
        let mut acc: Option<Vec<f64>> = None;
        for (e, w) in terms {
            if e.is_zero() || w == 0.0 {
                continue;
            }
            let v = self.values(e, jet)?;
            match acc.as_mut() {
                Some(acc) => acc.iter_mut().zip(&v).for_each(|(s, t)| *s += w * t),
                None => acc = Some(v.into_iter().map(|t| w * t).collect()),
            }
        }
        Ok(acc)
    }

    /// Directional derivative of `∫ e` along `dir`.
    pub fn variation(&self, jet: &CellJet, partials: &Partials, dir: &[Vec<f64>]) -> Result<f64> {
        let grid = self.problem.grid();
        let h = grid.step();
        let mut cells = vec![0.0; grid.n()];
        for (i, d) in dir.iter().enumerate() {
            let mid: Vec<f64> = d.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            let slope: Vec<f64> = d.windows(2).map(|w| (w[1] - w[0]) / h).collect();
            if !partials.y[i].is_zero() {
                let a = self.values(&partials.y[i], jet)?;
                cells.iter_mut().zip(a.iter().zip(&mid)).for_each(|(s, (a, m))| *s += a * m);
            }
            if !partials.dy[i].is_zero() {
                let b = self.values(&partials.dy[i], jet)?;
                cells.iter_mut().zip(b.iter().zip(&slope)).for_each(|(s, (b, v))| *s += b * v);
            }
            if let (false, Some(op)) = (partials.frac[i].is_zero(), &self.caputo) {
                let c = self.values(&partials.frac[i], jet)?;
                let dd = op.apply(d);
                cells.iter_mut().zip(c.iter().zip(&dd)).for_each(|(s, (c, v))| *s += c * v);
            }
        }
        Ok(h * compensated_sum(cells))
    }
}

/// Value of the discrete functional `∫_a^b L dx`.
pub fn functional_value(problem: &ProblemSpec, y: &SampledPath) -> Result<f64> {
    problem.check_path(y)?;
    let d = Discretization::new(problem);
    d.integral(problem.lagrangian(), &d.jet(y.components()))
}

/// `∫_a^b G^j dx` for every constraint.
pub fn constraint_values(problem: &ProblemSpec, y: &SampledPath) -> Result<Vec<f64>> {
    problem.check_path(y)?;
    let d = Discretization::new(problem);
    let jet = d.jet(y.components());
    problem
        .constraints()
        .iter()
        .map(|c| d.integral(&c.integrand, &jet))
        .collect()
}

/// First variation `d/dε J(y + ε h)` at `ε = 0` of the discrete functional,
/// from the symbolic partials of `L`.
pub fn first_variation(problem: &ProblemSpec, y: &SampledPath, h: &SampledPath) -> Result<f64> {
    problem.check_path(y)?;
    problem.check_path(h)?;
    let d = Discretization::new(problem);
    let jet = d.jet(y.components());
    d.variation(&jet, problem.partials(), h.components())
}
