//! Limited-memory BFGS with Armijo backtracking and an optional upper bound
//! on one variable (projected, with an active-set rule).

use std::collections::VecDeque;

use crate::error::Result;

/// Upper bound `x[index] ≤ cap`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Bound {
    pub index: usize,
    pub cap: f64,
}

pub(crate) struct Config {
    pub memory: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Per-variable weights in the stopping norm `max |w_k g_k|`.
    pub norm_weights: Vec<f64>,
}

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub trace: Vec<f64>,
}

/// Applies an approximation of the inverse Hessian's shape. The flag says
/// whether the bounded variable is currently held at its bound.
pub(crate) type Preconditioner<'a> = dyn Fn(&[f64], bool) -> Vec<f64> + 'a;

pub(crate) type Objective<'a> = dyn FnMut(&[f64]) -> Result<(f64, Vec<f64>)> + 'a;

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const MAX_EXPANSIONS: usize = 20;
/// Expansion continues while the slope keeps this fraction of its initial value.
const CURVATURE: f64 = 0.9;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

pub(crate) fn minimize(
    objective: &mut Objective<'_>,
    x0: Vec<f64>,
    precondition: &Preconditioner<'_>,
    bound: Option<Bound>,
    config: &Config,
) -> Result<Outcome> {
    let mut x = x0;
    if let Some(b) = bound {
        x[b.index] = x[b.index].min(b.cap);
    }
    let (mut f, mut g) = objective(&x)?;
    let mut trace = vec![f];
    let mut pairs: VecDeque<Pair> = VecDeque::with_capacity(config.memory);
    let mut active = is_active(&x, &g, bound);
    let mut iterations = 0;

    let norm = |g: &[f64], active: bool| -> f64 {
        g.iter()
            .zip(&config.norm_weights)
            .enumerate()
            .filter(|(k, _)| !(active && bound.map(|b| b.index) == Some(*k)))
            .fold(0.0, |m, (_, (gk, w))| m.max((gk * w).abs()))
    };

    loop {
        let gnorm = norm(&g, active);
        if gnorm <= config.tolerance {
            return Ok(Outcome {
                x,
                gradient_norm: gnorm,
                iterations,
                converged: true,
                trace,
            });
        }
        if iterations >= config.max_iterations {
            log::debug!("L-BFGS stopped at the iteration limit, gradient norm {gnorm:e}");
            return Ok(Outcome {
                x,
                gradient_norm: gnorm,
                iterations,
                converged: false,
                trace,
            });
        }
        iterations += 1;

        let mut accepted = None;
        for attempt in 0..2 {
            if attempt == 1 {
                if pairs.is_empty() {
                    break;
                }
                pairs.clear();
            }
            let d = direction(&g, &pairs, precondition, bound, active);
            if dot(&g, &d) >= 0.0 {
                pairs.clear();
                continue;
            }
            if let Some(step) = line_search(objective, &x, f, &g, &d, bound)? {
                accepted = Some(step);
                break;
            }
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            let gnorm = norm(&g, active);
            log::debug!("line search stalled, gradient norm {gnorm:e}");
            return Ok(Outcome {
                x,
                gradient_norm: gnorm,
                iterations,
                converged: gnorm <= config.tolerance,
                trace,
            });
        };

        let now_active = is_active(&x_new, &g_new, bound);
        if now_active != active {
            pairs.clear();
        } else {
            let mut s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let mut y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            if let (true, Some(b)) = (now_active, bound) {
                s[b.index] = 0.0;
                y[b.index] = 0.0;
            }
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
                if pairs.len() == config.memory {
                    pairs.pop_front();
                }
                pairs.push_back(Pair { s, y, rho: 1.0 / sy });
            }
        }
        active = now_active;
        x = x_new;
        f = f_new;
        g = g_new;
        trace.push(f);
    }
}

/// The bounded variable sits at its cap and the gradient pushes it outward.
fn is_active(x: &[f64], g: &[f64], bound: Option<Bound>) -> bool {
    match bound {
        Some(b) => x[b.index] >= b.cap && g[b.index] < 0.0,
        None => false,
    }
}

/// Two-loop recursion with a scaled preconditioner as initial inverse Hessian.
fn direction(
    g: &[f64],
    pairs: &VecDeque<Pair>,
    precondition: &Preconditioner<'_>,
    bound: Option<Bound>,
    active: bool,
) -> Vec<f64> {
    let fixed = bound.filter(|_| active).map(|b| b.index);
    let mut q = g.to_vec();
    if let Some(k) = fixed {
        q[k] = 0.0;
    }
    let mut alphas = Vec::with_capacity(pairs.len());
    for p in pairs.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        q.iter_mut().zip(&p.y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    let mut r = precondition(&q, active);
    if let Some(last) = pairs.back() {
        let hy = precondition(&last.y, active);
        let scale = dot(&last.s, &last.y) / dot(&last.y, &hy);
        if scale.is_finite() && scale > 0.0 {
            r.iter_mut().for_each(|v| *v *= scale);
        }
    }
    for (p, a) in pairs.iter().zip(alphas.into_iter().rev()) {
        let b = p.rho * dot(&p.y, &r);
        r.iter_mut().zip(&p.s).for_each(|(ri, si)| *ri += (a - b) * si);
    }
    if let Some(k) = fixed {
        r[k] = 0.0;
    }
    r.iter_mut().for_each(|v| *v = -*v);
    r
}

type Step = (Vec<f64>, f64, Vec<f64>);

fn line_search(
    objective: &mut Objective<'_>,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    bound: Option<Bound>,
) -> Result<Option<Step>> {
    let mut t = 1.0;
    for halving in 0..MAX_HALVINGS {
        match trial(objective, x, f, g, d, bound, t) {
            Some(step) => {
                if halving > 0 {
                    return Ok(Some(step.0));
                }
                return Ok(Some(expand(objective, x, f, g, d, bound, step)));
            }
            None => t *= 0.5,
        }
    }
    Ok(None)
}

/// Doubles an accepted unit step while the slope along the step stays
/// steep and the objective keeps dropping. Without this an Armijo-only
/// search in a curved valley yields pairs with `sᵀy ≤ 0` that must be
/// discarded, and the curvature memory goes stale.
fn expand(
    objective: &mut Objective<'_>,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    bound: Option<Bound>,
    first: (Step, f64),
) -> Step {
    let (mut best, mut slope_ratio) = first;
    let mut t = 1.0;
    for _ in 0..MAX_EXPANSIONS {
        if slope_ratio < CURVATURE {
            break;
        }
        t *= 2.0;
        match trial(objective, x, f, g, d, bound, t) {
            Some((step, ratio)) if step.1 < best.1 => {
                best = step;
                slope_ratio = ratio;
            }
            _ => break,
        }
    }
    best
}

/// Evaluates the projected point `x + t d`. Returns the step when it meets
/// the sufficient-decrease condition, together with the ratio of the
/// directional slope at the trial point to the initial slope.
fn trial(
    objective: &mut Objective<'_>,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    bound: Option<Bound>,
    t: f64,
) -> Option<(Step, f64)> {
    let mut point: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + t * di).collect();
    if let Some(b) = bound {
        point[b.index] = point[b.index].min(b.cap);
    }
    let step: Vec<f64> = point.iter().zip(x).map(|(a, b)| a - b).collect();
    let predicted = dot(g, &step);
    if predicted >= 0.0 {
        return None;
    }
    // trial points outside the integrand's domain count as rejected steps
    let (ft, gt) = objective(&point).ok()?;
    if !ft.is_finite() {
        return None;
    }
    let roundoff = 64.0 * f64::EPSILON * f.abs().max(f64::MIN_POSITIVE);
    if ft <= f + ARMIJO * predicted || (ft <= f && -predicted <= roundoff) {
        let ratio = dot(&gt, &step) / predicted;
        Some(((point, ft, gt), ratio))
    } else {
        None
    }
}
