mod common;

use std::f64::consts::PI;

use neel_core::specfun::*;
use proptest::prelude::*;

#[test]
fn i0_is_minus_euler_gamma() {
    let v = eval_i0(&QuadratureSpec::default()).unwrap();
    assert!((v.value + 0.577_215_664_901_532_9).abs() < 1e-12, "{v:?}");
}

#[test]
fn kernel_matches_simpson_oracle() {
    let spec = QuadratureSpec::default();
    for &t in &[1e-3, 0.05, 0.3, 1.0, 2.5, 7.0, 20.0, 39.0, 41.0, 100.0] {
        let v = eval_i(t, &spec).unwrap().value;
        let o = common::kernel_oracle(t);
        assert!((v - o).abs() < 1e-9 * (1.0 + o.abs()), "t={t}: {v} vs {o}");
    }
}

#[test]
fn kernel_reference_values() {
    let spec = QuadratureSpec::default();
    for (t, r) in [(0.1, 1.866_076_41), (1.0, 0.343_377_96), (3.0, 0.079_221_52)] {
        assert!((eval_i(t, &spec).unwrap().value - r).abs() < 1e-8);
    }
}

#[test]
fn cosine_form_agrees() {
    let spec = QuadratureSpec::default();
    for &t in &[0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0] {
        let a = eval_i(t, &spec).unwrap().value;
        let b = eval_i_alt(t, &spec).unwrap().value;
        assert!((a - b).abs() < 1e-8, "t={t}: {a} {b}");
    }
}

#[test]
fn derivatives_match_differences() {
    let spec = QuadratureSpec::default();
    for &t in &[0.01, 0.2, 1.0, 4.0, 39.9, 60.0] {
        let h = 1e-4 * t;
        let f = |x: f64| eval_i(x, &spec).unwrap().value;
        let fp = |x: f64| eval_i_prime(x, &spec).unwrap().value;
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (fp(t + h) - fp(t - h)) / (2.0 * h);
        let p = fp(t);
        let s = eval_i_second(t, &spec).unwrap().value;
        assert!((d1 - p).abs() < 1e-6 * p.abs(), "I' t={t}: {d1} {p}");
        assert!((d2 - s).abs() < 1e-6 * s.abs(), "I'' t={t}: {d2} {s}");
    }
}

#[test]
fn ratio_limits_and_root() {
    let spec = QuadratureSpec::default();
    assert!((derivative_ratio(1e-3, &spec).unwrap() - 0.5).abs() < 0.01);
    assert!((derivative_ratio(1e3, &spec).unwrap() - 0.125).abs() < 0.0025);
    for &q in &[0.13, 0.2, 1.0 / 3.0, 0.45, 0.49] {
        let t = ratio_root(q, &spec).unwrap();
        assert!((derivative_ratio(t, &spec).unwrap() - q).abs() < 1e-9, "q={q}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich_bounds(lt in -4.0f64..1.0) {
        let spec = QuadratureSpec::default();
        let t = 10f64.powf(lt);
        let i = eval_i(t, &spec).unwrap().value;
        let r = i + t.ln() + EULER_GAMMA;
        prop_assert!(r >= -1e-9 && r <= PI * t / 2.0 + 1e-9);
    }

    #[test]
    fn decay_bound(lt in -1.0f64..2.0) {
        let t = 10f64.powf(lt);
        let i = eval_i(t, &QuadratureSpec::default()).unwrap().value;
        prop_assert!(i > 0.0 && i <= 1.0 / (t * t));
    }

    #[test]
    fn kernel_is_decreasing_and_convex(lt in -3.0f64..2.5) {
        let spec = QuadratureSpec::default();
        let t = 10f64.powf(lt);
        prop_assert!(eval_i_prime(t, &spec).unwrap().value < 0.0);
        prop_assert!(eval_i_second(t, &spec).unwrap().value > 0.0);
    }

    #[test]
    fn ratio_is_monotone(lt in -3.0f64..3.0) {
        let spec = QuadratureSpec::default();
        let t = 10f64.powf(lt);
        let a = derivative_ratio(t, &spec).unwrap();
        let b = derivative_ratio(t * 1.05, &spec).unwrap();
        prop_assert!(b < a && a < 0.5 && b > 0.125);
    }
}
