mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use neel_core::geometry::{Model, Sign, WallConfig};
use neel_core::renorm::*;
use neel_core::specfun::{QuadratureSpec, EULER_GAMMA};
use proptest::prelude::*;

fn cfg(model: Model, alpha: f64, a: &[f64], d: &[i32]) -> WallConfig {
    let s = d.iter().map(|&x| Sign::try_from(x).unwrap()).collect();
    WallConfig::new(model, alpha, a.to_vec(), s).unwrap()
}

#[test]
fn single_unconfined_wall() {
    let r = renormalised_energy(&cfg(Model::Unconfined, FRAC_PI_2, &[0.0], &[1])).unwrap();
    assert!((r.value - FRAC_PI_2 * EULER_GAMMA).abs() < 1e-14);
    assert_eq!(r.gradient, vec![0.0]);
}

#[test]
fn translation_invariance() {
    let a = [-0.3, 0.4, 1.9];
    let b: Vec<f64> = a.iter().map(|x| x + 5.0).collect();
    let w1 = renormalised_energy(&cfg(Model::Unconfined, 1.2, &a, &[1, -1, 1])).unwrap().value;
    let w2 = renormalised_energy(&cfg(Model::Unconfined, 1.2, &b, &[1, -1, 1])).unwrap().value;
    assert!((w1 - w2).abs() < 1e-12);
}

#[test]
fn repelling_pair_blows_up() {
    let mut last = f64::NEG_INFINITY;
    for k in 1..12 {
        let t = 0.5f64.powi(k);
        let w = renormalised_energy(&cfg(Model::Confined, FRAC_PI_2, &[-t, t], &[1, -1])).unwrap().value;
        assert!(w > last);
        last = w;
    }
    assert!(last > 10.0);
}

#[test]
fn separated_pair_tends_to_self_terms() {
    for (gap, tol) in [(100.0, 3e-4), (200.0, 1e-4)] {
        let c = cfg(Model::Unconfined, 1.0, &[0.0, gap], &[1, -1]);
        let r = renormalised_energy(&c).unwrap();
        let s: f64 = r.self_terms.iter().sum();
        let bound = PI * (1.0f64.cos().powi(2) - 1.0).abs() / (gap * gap);
        assert!((r.value - s).abs() <= bound && (r.value - s).abs() < tol);
    }
}

#[test]
fn close_range_pair_is_logarithmic() {
    let g = [1.0, -1.0];
    for k in [4, 8, 12] {
        let t = 10f64.powi(-k);
        let c = cfg(Model::Confined, FRAC_PI_2, &[0.2, 0.2 + t], &[1, -1]);
        let r = renormalised_energy(&c).unwrap();
        let rho = neel_core::geometry::varrho(0.2, 0.2 + t).unwrap();
        let ratio = r.pair_terms[0][1] / (FRAC_PI_2 * g[0] * g[1] * rho.ln());
        assert!((ratio - 1.0).abs() < 2.0 / k as f64, "{ratio}");
    }
}

#[test]
fn confined_pair_minimum_is_symmetric() {
    let c = cfg(Model::Confined, FRAC_PI_2, &[-0.7, 0.1], &[1, -1]);
    let r = minimize_w(&c, &MinimizeOptions::default()).unwrap();
    assert_eq!(r.status, MinimizeStatus::Converged);
    assert!(r.gradient_norm <= 1e-8);
    assert!((r.argmin[0] + r.argmin[1]).abs() < 1e-6, "{:?}", r.argmin);
}

#[test]
fn confined_triple_minimum() {
    let c = cfg(Model::Confined, FRAC_PI_2, &[-0.6, 0.1, 0.3], &[1, -1, 1]);
    let r = minimize_w(&c, &MinimizeOptions::default()).unwrap();
    assert_eq!(r.status, MinimizeStatus::Converged, "{r:?}");
    assert!(r.gradient_norm <= 1e-8);
    assert!(r.min_hessian_eigenvalue.unwrap() > 0.0);
    assert!((r.argmin[0] + r.argmin[2]).abs() < 1e-6 && r.argmin[1].abs() < 1e-6);
}

#[test]
fn inadmissible_angle_diverges() {
    let d = Sign::alternating(3, Sign::Minus);
    let range = admissible_range(&d).unwrap();
    assert!(!range.contains(0.2));
    assert!(!all_subblock_sums_negative(&d, 0.2));
    let c = WallConfig::new(Model::Confined, 0.2, vec![-0.5, 0.0, 0.5], d).unwrap();
    let r = minimize_w(&c, &MinimizeOptions::default()).unwrap();
    assert_eq!(r.status, MinimizeStatus::DivergingToMinusInfinity, "{r:?}");
    let (k, l) = positive_subblock(c.signs(), 0.2).unwrap();
    let etas: Vec<f64> = (0..13).map(|i| 10f64.powi(-i)).collect();
    let scan = scan_path(&c, CollapsePath::SubBlock { first: k, last: l }, &etas).unwrap();
    assert!(scan.windows(2).all(|p| p[1].w < p[0].w));
    assert!(scan.last().unwrap().w < -100.0);
}

#[test]
fn admissible_angle_uniform_collapse_is_repelled() {
    for (n, first) in [(2, Sign::Plus), (3, Sign::Plus), (4, Sign::Minus), (5, Sign::Minus)] {
        let d = Sign::alternating(n, first);
        let r = admissible_range(&d).unwrap();
        let alpha = 0.5 * (r.lower + r.upper);
        assert!(all_subblock_sums_negative(&d, alpha));
        let a: Vec<f64> = (0..n).map(|i| -0.5 + i as f64 / (n - 1) as f64).collect();
        let c = WallConfig::new(Model::Confined, alpha, a, d).unwrap();
        let etas: Vec<f64> = (0..10).map(|i| 10f64.powi(-i)).collect();
        let scan = scan_path(&c, CollapsePath::Uniform, &etas).unwrap();
        assert!(scan.windows(2).skip(2).all(|p| p[1].w > p[0].w), "n={n}");
    }
}

#[test]
fn alternating_closed_forms() {
    for k in 2..9 {
        for &alpha in &[0.3, 1.0, 2.0, 2.9] {
            for first in [Sign::Plus, Sign::Minus] {
                let d = Sign::alternating(k, first);
                let direct = sign_sum(&d, alpha, 0, k - 1).unwrap();
                assert!((direct - alternating_sign_sum(k, alpha, first)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn alternating_negativity_matches_range() {
    for n in 2..9 {
        for first in [Sign::Plus, Sign::Minus] {
            let d = Sign::alternating(n, first);
            let r = admissible_range(&d).unwrap();
            for k in 1..200 {
                let alpha = PI * k as f64 / 200.0;
                if (alpha - r.lower).abs() < 1e-9 || (alpha - r.upper).abs() < 1e-9 {
                    continue;
                }
                assert_eq!(all_subblock_sums_negative(&d, alpha), r.contains(alpha), "n={n} alpha={alpha}");
            }
        }
    }
}

#[test]
fn three_wall_critical_point() {
    let alpha = (-0.5f64).acos();
    let d = Sign::alternating(3, Sign::Plus);
    let spec = QuadratureSpec::default();
    let cp = critical_point_n3(alpha, &d, &spec).unwrap().unwrap();
    assert!(cp.gradient_norm <= 1e-8, "{cp:?}");
    assert!(critical_point_n3(FRAC_PI_2, &d, &spec).unwrap().is_none());
    assert!(critical_point_n3((-0.9f64).acos(), &d, &spec).unwrap().is_none());
    let c = WallConfig::new(Model::Unconfined, alpha, vec![0.0, 1.0, 2.0], d).unwrap();
    let runs = multi_start_minimize(&c, 8, 7, &MinimizeOptions::default()).unwrap();
    for r in runs {
        assert_ne!(r.status, MinimizeStatus::Converged, "{r:?}");
    }
}

#[test]
fn unconfined_pair_has_no_critical_point() {
    let c = cfg(Model::Unconfined, 1.0, &[0.0, 0.7], &[1, -1]);
    let r = minimize_w(&c, &MinimizeOptions::default()).unwrap();
    assert_eq!(r.status, MinimizeStatus::NoCriticalPoint, "{r:?}");
}

fn config_strategy() -> impl Strategy<Value = (Model, f64, Vec<f64>, Vec<i32>)> {
    (prop_oneof![Just(Model::Confined), Just(Model::Unconfined)], 0.1f64..3.0, 1usize..5).prop_flat_map(
        |(m, alpha, n)| {
            let pos = prop::collection::vec(-0.9f64..0.9, n);
            let signs = prop::collection::vec(prop_oneof![Just(1), Just(-1)], n);
            (Just(m), Just(alpha), pos, signs)
        },
    )
}

fn build(m: Model, alpha: f64, mut pos: Vec<f64>, signs: Vec<i32>) -> Option<WallConfig> {
    pos.sort_by(|a, b| a.total_cmp(b));
    if pos.windows(2).any(|w| w[1] - w[0] < 0.02) {
        return None;
    }
    let s = signs.iter().map(|&x| Sign::try_from(x).unwrap()).collect();
    WallConfig::new(m, alpha, pos, s).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_and_gradient((m, alpha, pos, signs) in config_strategy()) {
        let Some(c) = build(m, alpha, pos, signs) else { return Ok(()) };
        let r = renormalised_energy(&c).unwrap();
        let sum: f64 = r.self_terms.iter().sum::<f64>() + r.pair_terms.iter().flatten().sum::<f64>();
        prop_assert!((sum - r.value).abs() < 1e-12 * (1.0 + r.value.abs()));
        for k in 0..c.len() {
            for n in 0..c.len() {
                prop_assert_eq!(r.pair_terms[k][n], r.pair_terms[n][k]);
            }
        }
        let h = 1e-6;
        let fd = common::central_difference(
            |a| renormalised_energy(&c.with_positions(a.to_vec()).unwrap()).unwrap().value,
            c.positions(),
            h,
        );
        for (x, y) in fd.iter().zip(&r.gradient) {
            prop_assert!((x - y).abs() <= 1e-5 * (1.0 + y.abs()), "{} {}", x, y);
        }
    }

    #[test]
    fn reflection_symmetry((m, alpha, pos, signs) in config_strategy()) {
        let Some(c) = build(m, alpha, pos, signs) else { return Ok(()) };
        let a: Vec<f64> = c.positions().iter().rev().map(|x| -x).collect();
        let d: Vec<Sign> = c.signs().iter().rev().copied().collect();
        let r = WallConfig::new(m, alpha, a, d).unwrap();
        let w1 = renormalised_energy(&c).unwrap().value;
        let w2 = renormalised_energy(&r).unwrap().value;
        prop_assert!((w1 - w2).abs() < 1e-10 * (1.0 + w1.abs()));
    }

    #[test]
    fn opposite_signs_repel_equal_signs_attract(
        m in prop_oneof![Just(Model::Confined), Just(Model::Unconfined)],
        alpha in 0.5f64..2.6,
        centre in -0.3f64..0.3,
        gap in 0.01f64..0.1,
        same in any::<bool>(),
    ) {
        let d = if same { [1, 1] } else { [1, -1] };
        let w = |g: f64| {
            renormalised_energy(&cfg(m, alpha, &[centre - g / 2.0, centre + g / 2.0], &d)).unwrap().value
        };
        if same {
            prop_assert!(w(gap / 2.0) < w(gap));
        } else {
            prop_assert!(w(gap / 2.0) > w(gap));
        }
    }
}
