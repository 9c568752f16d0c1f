mod common;

use common::{relative, tanh_sinh};
use fracvar::specfun::{erfc, gamma, mittag_leffler};
use proptest::prelude::*;

#[test]
fn mittag_leffler_order_one_is_exponential_on_a_grid() {
    for k in 0..=100 {
        let z = -5.0 + 0.1 * k as f64;
        let v = mittag_leffler(1.0, z).unwrap();
        assert!(relative(v, z.exp()) <= 1e-10, "z = {z}");
    }
}

#[test]
fn mittag_leffler_half_matches_the_defining_series_at_minus_one() {
    // the series at |z| = 1 converges fast and loses no digits to cancellation
    let mut sum = 0.0;
    let mut k = 0;
    loop {
        let term = (-1f64).powi(k) / gamma(0.5 * k as f64 + 1.0).unwrap();
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
        k += 1;
    }
    let v = mittag_leffler(0.5, -1.0).unwrap();
    assert!(relative(v, sum) <= 1e-13);
    assert!(relative(v, 1f64.exp() * erfc(1.0)) <= 1e-12);
    assert!((v - 0.42758).abs() < 1e-5);
}

#[test]
fn erfc_matches_its_defining_integral() {
    let integral = |z: f64| {
        tanh_sinh(|t, _, _| (-t * t).exp(), z, z + 12.0) * 2.0 / std::f64::consts::PI.sqrt()
    };
    for z in [0.0, 0.3, 1.0, 2.5, 4.0, 5.9] {
        assert!(relative(erfc(z), integral(z)) <= 1e-10, "z = {z}");
    }
    assert!((erfc(1.0) - 0.157_299_207).abs() < 1e-9);
}

#[test]
fn large_negative_mittag_leffler_arguments() {
    // E_α(-x) is completely monotone: positive and decreasing in x
    for alpha in [0.1, 0.3, 0.5, 0.8, 0.999] {
        let mut previous = 1.0;
        for k in 1..=30 {
            let v = mittag_leffler(alpha, -(k as f64)).unwrap();
            assert!(v > 0.0 && v < previous, "alpha {alpha}, z = -{k}");
            previous = v;
        }
    }
}

proptest! {
    #[test]
    fn half_order_mittag_leffler_matches_scaled_erfc(x in 0.0f64..3.0) {
        let v = mittag_leffler(0.5, -x).unwrap();
        prop_assert!(relative(v, (x * x).exp() * erfc(x)) <= 1e-9);
    }

    #[test]
    fn erfc_reflection(z in -4.0f64..4.0) {
        prop_assert!((erfc(z) + erfc(-z) - 2.0).abs() <= 1e-13);
    }

    #[test]
    fn gamma_recurrence(x in 0.1f64..20.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!(relative(lhs, rhs) <= 1e-12);
    }

    #[test]
    fn mittag_leffler_order_one(z in -5.0f64..5.0) {
        prop_assert!(relative(mittag_leffler(1.0, z).unwrap(), z.exp()) <= 1e-10);
    }
}
