mod common;

use common::{gamma, left_caputo_oracle, left_rlfi_oracle, relative, right_caputo_oracle};
use fracvar::fracops::{
    check_combined_parts, check_rlfi_parts, combined_caputo, dual_combined_rl, left_caputo,
    left_rlfd, left_rlfi, right_caputo, right_rlfd, right_rlfi,
};
use fracvar::{Error, FractionalParams, Grid, SampledPath};
use proptest::prelude::*;

fn unit(n: usize) -> Grid {
    Grid::new(0.0, 1.0, n).unwrap()
}

fn sample(n: usize, f: impl Fn(f64) -> f64) -> SampledPath {
    SampledPath::from_fn(unit(n), f).unwrap()
}

fn max_dev(p: &SampledPath, f: impl Fn(f64) -> f64, nodes: impl Iterator<Item = usize>) -> f64 {
    nodes
        .map(|k| (p.at(0, k) - f(p.grid().node(k))).abs())
        .fold(0.0, f64::max)
}

#[test]
fn euler_monomial_formula_agrees_with_the_defining_integrals() {
    for x in [0.25, 0.5, 1.0] {
        let rlfi = left_rlfi_oracle(|t| t, 0.3, 0.0, x);
        assert!(relative(rlfi, x.powf(1.3) / gamma(2.3)) <= 1e-12);
        let caputo = left_caputo_oracle(|t| 2.0 * t, 0.4, 0.0, x);
        assert!(relative(caputo, 2.0 * x.powf(1.6) / gamma(2.6)) <= 1e-12);
        let right = right_caputo_oracle(|_| -1.0, 0.5, 1.0 - x, 1.0);
        assert!(relative(right, x.powf(0.5) / gamma(1.5)) <= 1e-12);
    }
}

#[test]
fn rlfi_is_exact_on_lines() {
    // the product-trapezoidal rule integrates the interpolant exactly
    let v = left_rlfi(&sample(100, |t| t), 0.3).unwrap();
    assert!(max_dev(&v, |x| x.powf(1.3) / gamma(2.3), 0..=100) <= 1e-14);
    let r = right_rlfi(&sample(100, |t| 1.0 - t), 0.3).unwrap();
    assert!(max_dev(&r, |x| (1.0 - x).powf(1.3) / gamma(2.3), 0..=100) <= 1e-14);
}

#[test]
fn rlfi_converges_at_second_order() {
    let exact = |x: f64| left_rlfi_oracle(f64::exp, 0.3, 0.0, x);
    let errors: Vec<f64> = [50, 100, 200, 400]
        .iter()
        .map(|&n| {
            let v = left_rlfi(&sample(n, f64::exp), 0.3).unwrap();
            [n / 4, n / 2, n].iter().map(|&k| (v.at(0, k) - exact(v.grid().node(k))).abs()).fold(0.0, f64::max)
        })
        .collect();
    for w in errors.windows(2) {
        assert!(w[0] / w[1] >= 3.5, "{errors:?}");
    }
}

#[test]
fn right_rlfi_of_one() {
    let v = right_rlfi(&sample(100, |_| 1.0), 0.5).unwrap();
    assert!(max_dev(&v, |x| (1.0 - x).sqrt() / gamma(1.5), 0..=100) <= 1e-13);
    assert_eq!(v.at(0, 100), 0.0);
}

#[test]
fn caputo_of_monomials() {
    let v = left_caputo(&sample(100, |t| t), 0.5).unwrap();
    assert!(max_dev(&v, |x| x.sqrt() / gamma(1.5), 0..=100) <= 1e-13);
    let r = right_caputo(&sample(100, |t| 1.0 - t), 0.5).unwrap();
    assert!(max_dev(&r, |x| (1.0 - x).sqrt() / gamma(1.5), 0..=100) <= 1e-13);
    assert_eq!(r.at(0, 100), 0.0);
}

fn caputo_square_error(alpha: f64, n: usize, x: f64) -> f64 {
    let v = left_caputo(&sample(n, |t| t * t), alpha).unwrap();
    let k = (x * n as f64).round() as usize;
    (v.at(0, k) - left_caputo_oracle(|t| 2.0 * t, alpha, 0.0, x)).abs()
}

#[test]
fn caputo_of_square_converges_at_the_l1_rate() {
    for x in [0.25, 0.5, 1.0] {
        let e: Vec<f64> = [100, 200, 400, 800].iter().map(|&n| caputo_square_error(0.4, n, x)).collect();
        for w in e.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.5, "x = {x}: orders from {e:?}");
        }
    }
    for alpha in [0.1, 0.3, 0.5] {
        let e: Vec<f64> = [100, 200, 400, 800].iter().map(|&n| caputo_square_error(alpha, n, 1.0)).collect();
        for w in e.windows(2) {
            assert!((w[0] / w[1]).log2() >= 1.4, "alpha {alpha}: {e:?}");
        }
    }
}

#[test]
fn rlfd_of_one_away_from_the_base_point() {
    let n = 400;
    let one = sample(n, |_| 1.0);
    let left = left_rlfd(&one, 0.5).unwrap();
    let right = right_rlfd(&one, 0.5).unwrap();
    let g = gamma(0.5);
    for k in 40..=n {
        let x = left.grid().node(k);
        assert!(relative(left.at(0, k), x.powf(-0.5) / g) <= 1e-3, "x = {x}");
        let xr = right.grid().node(n - k);
        assert!(relative(right.at(0, n - k), (1.0 - xr).powf(-0.5) / g) <= 1e-3);
    }
}

#[test]
fn dual_operator_of_one() {
    let n = 400;
    let params = FractionalParams::new(0.5, 0.5, 0.5).unwrap();
    let v = dual_combined_rl(&sample(n, |_| 1.0), &params).unwrap();
    let g = gamma(0.5);
    for k in 40..=360 {
        let x = v.grid().node(k);
        let exact = 0.5 * (x.powf(-0.5) + (1.0 - x).powf(-0.5)) / g;
        assert!(relative(v.at(0, k), exact) <= 1e-3);
    }
}

#[test]
fn dual_operator_endpoints() {
    let f = sample(64, |t| (2.0 * t).cos());
    let one = FractionalParams::new(0.3, 0.7, 1.0).unwrap();
    let zero = FractionalParams::new(0.3, 0.7, 0.0).unwrap();
    assert_eq!(dual_combined_rl(&f, &one).unwrap(), right_rlfd(&f, 0.3).unwrap());
    assert_eq!(dual_combined_rl(&f, &zero).unwrap(), left_rlfd(&f, 0.7).unwrap());
}

#[test]
fn combined_operator_endpoints_are_bit_identical() {
    let f = sample(64, |t| (3.0 * t).sin() + t * t);
    let one = FractionalParams::new(0.3, 0.7, 1.0).unwrap();
    let zero = FractionalParams::new(0.3, 0.7, 0.0).unwrap();
    let left = left_caputo(&f, 0.3).unwrap();
    let right = right_caputo(&f, 0.7).unwrap();
    assert_eq!(combined_caputo(&f, &one).unwrap(), left);
    assert_eq!(combined_caputo(&f, &zero).unwrap(), right);
    let half = FractionalParams::new(0.4, 0.4, 0.5).unwrap();
    let mean = combined_caputo(&f, &half).unwrap();
    let l = left_caputo(&f, 0.4).unwrap();
    let r = right_caputo(&f, 0.4).unwrap();
    for k in 0..=64 {
        assert!((mean.at(0, k) - 0.5 * (l.at(0, k) + r.at(0, k))).abs() <= 1e-15);
    }
}

#[test]
fn combined_operator_acts_per_component() {
    let grid = unit(32);
    let a: Vec<f64> = grid.nodes().iter().map(|x| x.exp()).collect();
    let b: Vec<f64> = grid.nodes().iter().map(|x| x * x).collect();
    let params = FractionalParams::new(0.3, 0.6, 0.25).unwrap();
    let both = combined_caputo(&SampledPath::new(grid, vec![a.clone(), b.clone()]).unwrap(), &params).unwrap();
    let first = combined_caputo(&SampledPath::scalar(grid, a).unwrap(), &params).unwrap();
    let second = combined_caputo(&SampledPath::scalar(grid, b).unwrap(), &params).unwrap();
    assert_eq!(both.component(0), first.component(0));
    assert_eq!(both.component(1), second.component(0));
}

#[test]
fn composition_recovers_the_function() {
    let n = 400;
    let f = sample(n, f64::sin);
    let back = left_rlfd(&left_rlfi(&f, 0.5).unwrap(), 0.5).unwrap();
    let h = 1.0 / n as f64;
    assert!(max_dev(&back, f64::sin, 1..n) <= 10.0 * h);
}

#[test]
fn order_and_shape_errors() {
    let f = sample(10, |t| t);
    assert!(matches!(left_rlfi(&f, 0.0), Err(Error::Domain(_))));
    assert!(matches!(left_caputo(&f, 1.0), Err(Error::Domain(_))));
    assert!(matches!(right_rlfd(&f, -0.5), Err(Error::Domain(_))));
    let g = SampledPath::from_fn(Grid::new(0.0, 2.0, 10).unwrap(), |t| t).unwrap();
    assert!(matches!(check_rlfi_parts(&f, &g, 0.5), Err(Error::GridMismatch)));
}

#[test]
fn rlfi_parts_identity() {
    let f = sample(200, |t| (2.0 * t).sin() + 1.0);
    // a function paired with its own reflection satisfies the discrete
    // identity exactly; a function paired with itself only in the limit
    assert!(check_rlfi_parts(&f, &f.reversed(), 0.5).unwrap() <= 1e-10);
    let mut previous = f64::INFINITY;
    for n in [100, 200, 400, 800] {
        let f = sample(n, |t| (2.0 * t).sin() + 1.0);
        let r = check_rlfi_parts(&f, &f, 0.5).unwrap();
        assert!(r <= previous / 2.0, "n = {n}: {r} after {previous}");
        previous = r;
    }
    assert!(previous <= 1e-4);
    let zero = sample(200, |_| 0.0);
    assert_eq!(check_rlfi_parts(&zero, &f, 0.5).unwrap(), 0.0);

    let coarse = check_rlfi_parts(&sample(200, |t| t), &sample(200, |t| 1.0 - t), 0.5).unwrap();
    let fine = check_rlfi_parts(&sample(400, |t| t), &sample(400, |t| 1.0 - t), 0.5).unwrap();
    assert!(fine <= 5e-4 && fine <= 0.25 * coarse + 1e-15);

    let mut previous = f64::INFINITY;
    for n in [100, 200, 400, 800] {
        let r = check_rlfi_parts(&sample(n, |t| t), &sample(n, f64::exp), 0.5).unwrap();
        assert!(r <= previous / 2.0, "n = {n}: {r} after {previous}");
        previous = r;
    }
}

#[test]
fn combined_parts_identity() {
    let params = FractionalParams::new(0.6, 0.4, 0.3).unwrap();
    let mut previous = f64::INFINITY;
    for n in [100, 200, 400, 800] {
        let parts =
            check_combined_parts(&sample(n, |t| t * (1.0 - t)), &sample(n, f64::exp), &params).unwrap();
        assert!(parts.boundary_term.abs() <= 1e-10);
        assert!(parts.residual <= previous / 2.0, "n = {n}");
        previous = parts.residual;
    }
    assert!(previous <= 1e-2);

    let zero = check_combined_parts(&sample(50, |_| 0.0), &sample(50, f64::exp), &params).unwrap();
    assert_eq!((zero.lhs, zero.rhs_integral, zero.boundary_term, zero.residual), (0.0, 0.0, 0.0, 0.0));
}

fn random_samples(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_linear(
        f in random_samples(100),
        g in random_samples(100),
        c1 in -3.0f64..3.0,
        c2 in -3.0f64..3.0,
        alpha in 0.05f64..0.95,
        beta in 0.05f64..0.95,
        gamma in 0.0f64..1.0,
    ) {
        let grid = unit(100);
        let fp = SampledPath::scalar(grid, f.clone()).unwrap();
        let gp = SampledPath::scalar(grid, g.clone()).unwrap();
        let mix = SampledPath::scalar(grid, f.iter().zip(&g).map(|(a, b)| c1 * a + c2 * b).collect()).unwrap();
        let params = FractionalParams::new(alpha, beta, gamma).unwrap();
        type Op = Box<dyn Fn(&SampledPath) -> SampledPath>;
        let ops: Vec<Op> = vec![
            Box::new(move |p| left_rlfi(p, alpha).unwrap()),
            Box::new(move |p| right_rlfi(p, alpha).unwrap()),
            Box::new(move |p| left_caputo(p, alpha).unwrap()),
            Box::new(move |p| right_caputo(p, alpha).unwrap()),
            Box::new(move |p| left_rlfd(p, alpha).unwrap()),
            Box::new(move |p| right_rlfd(p, alpha).unwrap()),
            Box::new(move |p| combined_caputo(p, &params).unwrap()),
            Box::new(move |p| dual_combined_rl(p, &params).unwrap()),
        ];
        for op in &ops {
            let lhs = op(&mix);
            let rhs = op(&fp).scaled(c1).axpy(c2, &op(&gp)).unwrap();
            let scale = 1.0f64.max(rhs.max_abs());
            prop_assert!(lhs.max_distance(&rhs).unwrap() <= 1e-12 * scale);
        }
    }

    #[test]
    fn right_operators_are_reflected_left_operators(
        f in random_samples(80),
        alpha in 0.05f64..0.95,
    ) {
        let p = SampledPath::scalar(Grid::new(-0.5, 1.5, 80).unwrap(), f).unwrap();
        let rev = p.reversed();
        prop_assert_eq!(right_rlfi(&p, alpha).unwrap(), left_rlfi(&rev, alpha).unwrap().reversed());
        let rc = right_caputo(&p, alpha).unwrap();
        let lc = left_caputo(&rev, alpha).unwrap().reversed();
        prop_assert!(rc.max_distance(&lc).unwrap() <= 1e-13 * 1f64.max(lc.max_abs()));
        let rd = right_rlfd(&p, alpha).unwrap();
        let ld = left_rlfd(&rev, alpha).unwrap().reversed();
        prop_assert!(rd.max_distance(&ld).unwrap() <= 1e-13 * 1f64.max(ld.max_abs()));
    }

    #[test]
    fn caputo_annihilates_constants(c in -1e6f64..1e6, alpha in 0.01f64..0.99, n in 4usize..300) {
        let p = sample(n, |_| c);
        prop_assert!(left_caputo(&p, alpha).unwrap().max_abs() <= 1e-13 * c.abs());
        prop_assert!(right_caputo(&p, alpha).unwrap().max_abs() <= 1e-13 * c.abs());
    }
}
