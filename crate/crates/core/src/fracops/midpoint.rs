//! Combined Caputo derivative of a piecewise-linear path, evaluated exactly
//! at cell midpoints.
//!
//! This is the operator used by the discrete functional. For nodes `y_k`
//! and jumps `Δ_j = y_{j+1} - y_j`, the left part at the midpoint of cell
//! `m` is `h^{-α}/Γ(2-α) · Σ_{j ≤ m} e_{m-j} Δ_j` and the right part is
//! `-h^{-β}/Γ(2-β) · Σ_{j ≥ m} e_{j-m} Δ_j`, where `e` are the midpoint
//! weights. Both are Toeplitz sums, so the transpose is cheap to apply.

use super::{weights, FractionalParams};
use crate::grid::Grid;
use crate::specfun::gamma;

#[derive(Debug, Clone)]
pub struct MidpointCaputo {
    n: usize,
    left_scale: f64,
    right_scale: f64,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl MidpointCaputo {
    pub fn new(grid: &Grid, params: &FractionalParams) -> Self {
        let n = grid.n();
        let h = grid.step();
        let g = params.gamma();
        let (alpha, beta) = (params.alpha(), params.beta());
        let left_scale = if g > 0.0 {
            g * h.powf(-alpha) / gamma(2.0 - alpha).expect("2 - alpha > 0")
        } else {
            0.0
        };
        let right_scale = if g < 1.0 {
            (1.0 - g) * h.powf(-beta) / gamma(2.0 - beta).expect("2 - beta > 0")
        } else {
            0.0
        };
        MidpointCaputo {
            n,
            left_scale,
            right_scale,
            left: if g > 0.0 { weights::midpoint(alpha, n) } else { Vec::new() },
            right: if g < 1.0 { weights::midpoint(beta, n) } else { Vec::new() },
        }
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.n
    }

    /// Midpoint values from the `n + 1` node values.
    pub fn apply(&self, nodes: &[f64]) -> Vec<f64> {
        assert_eq!(nodes.len(), self.n + 1, "node vector length");
        let jumps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let mut out = vec![0.0; self.n];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut value = 0.0;
            if self.left_scale != 0.0 {
                let mut acc = 0.0;
                for j in 0..=m {
                    acc += self.left[m - j] * jumps[j];
                }
                value += self.left_scale * acc;
            }
            if self.right_scale != 0.0 {
                let mut acc = 0.0;
                for j in m..self.n {
                    acc += self.right[j - m] * jumps[j];
                }
                value -= self.right_scale * acc;
            }
            *slot = value;
        }
        out
    }

    /// Transpose of [`apply`](Self::apply): maps `n` midpoint weights to
    /// `n + 1` node sensitivities.
    pub fn apply_transpose(&self, cells: &[f64]) -> Vec<f64> {
        assert_eq!(cells.len(), self.n, "cell vector length");
        let mut by_jump = vec![0.0; self.n];
        for (j, slot) in by_jump.iter_mut().enumerate() {
            let mut value = 0.0;
            if self.left_scale != 0.0 {
                let mut acc = 0.0;
                for m in j..self.n {
                    acc += self.left[m - j] * cells[m];
                }
                value += self.left_scale * acc;
            }
            if self.right_scale != 0.0 {
                let mut acc = 0.0;
                for m in 0..=j {
                    acc += self.right[j - m] * cells[m];
                }
                value -= self.right_scale * acc;
            }
            *slot = value;
        }
        let mut out = vec![0.0; self.n + 1];
        for (j, w) in by_jump.iter().enumerate() {
            out[j] -= w;
            out[j + 1] += w;
        }
        out
    }
}
