//! Uniform grids and vector-valued functions sampled on them.

use crate::error::{Error, Result};

/// Uniform partition of `[a, b]` into `n` subintervals (`n + 1` nodes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidGrid(format!("endpoints must be finite, got [{a}, {b}]")));
        }
        if !(a < b) {
            return Err(Error::InvalidGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 subintervals, got {n}")));
        }
        Ok(Grid { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.n {
            self.b
        } else {
            self.a + (self.b - self.a) * (k as f64 / self.n as f64)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.node(k)).collect()
    }

    /// Midpoint of cell `m` (between nodes `m` and `m + 1`).
    pub fn midpoint(&self, m: usize) -> f64 {
        self.a + (self.b - self.a) * ((m as f64 + 0.5) / self.n as f64)
    }

    /// Composite trapezoidal rule over node values.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let last = values.len() - 1;
        let inner = compensated_sum(values[1..last].iter().copied());
        self.step() * (inner + 0.5 * (values[0] + values[last]))
    }
}

/// Neumaier-compensated summation in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Second-order finite-difference derivative of node values: centred in the
/// interior, one-sided three-point at the two ends.
pub fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    assert!(n >= 2, "derivative needs at least three nodes");
    let mut out = vec![0.0; n + 1];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    for k in 1..n {
        out[k] = (values[k + 1] - values[k - 1]) / (2.0 * h);
    }
    out[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h);
    out
}

/// An `N`-component function sampled at every node of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl SampledPath {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Shape("a path needs at least one component".into()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "component {} has {} values, grid has {} nodes",
                    i + 1,
                    c.len(),
                    grid.len()
                )));
            }
            if let Some(k) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::Shape(format!(
                    "component {} is not finite at node {k}",
                    i + 1
                )));
            }
        }
        Ok(SampledPath { grid, components })
    }

    /// Single-component path from node values.
    pub fn scalar(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, vec![values])
    }

    /// Single-component path sampling `f` at the nodes.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::scalar(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        SampledPath {
            grid,
            components: vec![vec![0.0; grid.len()]; dim.max(1)],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, components: Vec<Vec<f64>>) -> Self {
        SampledPath { grid, components }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of components `N`.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.components[i]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    /// Value of component `i` at node `k`.
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.components[i][k]
    }

    /// Node-reversed path, i.e. the samples of `t ↦ f(a + b - t)`.
    pub fn reversed(&self) -> SampledPath {
        SampledPath {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().rev().copied().collect())
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> SampledPath {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SampledPath {
        SampledPath {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    /// `self + c * other`, node-wise.
    pub fn axpy(&self, c: f64, other: &SampledPath) -> Result<SampledPath> {
        self.check_same_shape(other)?;
        Ok(SampledPath {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(u, v)| u.iter().zip(v).map(|(a, b)| a + c * b).collect())
                .collect(),
        })
    }

    pub fn check_same_shape(&self, other: &SampledPath) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "paths have {} and {} components",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Largest absolute node value over all components.
    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max-norm distance to another path of the same shape.
    pub fn max_distance(&self, other: &SampledPath) -> Result<f64> {
        Ok(self.axpy(-1.0, other)?.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(1.0, 0.0, 10).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 4).is_err());
        let g = Grid::new(-1.0, 2.0, 6).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.node(0), -1.0);
        assert_eq!(g.node(6), 2.0);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!((g.step() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_is_exact_on_quadratics() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        let d = derivative(&v, g.step());
        for (k, x) in g.nodes().iter().enumerate() {
            assert!((d[k] - (6.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn path_rejects_bad_shapes() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        assert!(SampledPath::scalar(g, vec![0.0; 4]).is_err());
        assert!(SampledPath::scalar(g, vec![0.0, 1.0, f64::NAN, 0.0, 0.0]).is_err());
        assert!(SampledPath::new(g, vec![]).is_err());
    }

    #[test]
    fn trapezoid_integrates_lines_exactly() {
        let g = Grid::new(0.0, 2.0, 7).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|x| 1.0 + x).collect();
        assert!((g.trapezoid(&v) - 4.0).abs() < 1e-14);
    }
}
