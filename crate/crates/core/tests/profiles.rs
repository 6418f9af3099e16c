use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use neel_core::geometry::{gammas, Sign};
use neel_core::profiles::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn step(alpha: f64, base: f64, jumps: &[(f64, f64)]) -> StepFunction {
    StepFunction::new(alpha, base, jumps.iter().map(|&(b, size)| Jump { b, size }).collect()).unwrap()
}

fn on_lattice(v: f64, alpha: f64) -> bool {
    [v - alpha, v + alpha].iter().any(|x| {
        let r = (x / (2.0 * PI)).round();
        (x - 2.0 * PI * r).abs() < 1e-9
    })
}

#[test]
fn full_turn_splits_into_two_atoms() {
    let s = step(FRAC_PI_4, -FRAC_PI_4, &[(0.0, 2.0 * PI)]);
    let atoms = s.decompose().unwrap();
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0].sigma - FRAC_PI_2).abs() < 1e-15 && (atoms[1].sigma - 1.5 * PI).abs() < 1e-15);
    assert!(atoms.iter().all(|a| a.b == 0.0 && a.sigma > 0.0));
    assert!(((atoms[0].sigma + atoms[1].sigma).abs() - 2.0 * PI).abs() < 1e-15);
    assert_eq!(s.iota(), 2);
    assert!((s.eta() - 1.5 * PI).abs() < 1e-14);
    assert!(!s.is_simple());
    assert!(s.transition_profile().is_err());
}

#[test]
fn single_atoms() {
    let a = 0.7;
    let up = step(a, -a, &[(0.0, 2.0 * a)]);
    assert_eq!(up.decompose().unwrap().len(), 1);
    let down = step(a, -a, &[(0.0, -(2.0 * PI - 2.0 * a))]);
    let atoms = down.decompose().unwrap();
    assert_eq!(atoms.len(), 1);
    assert!((atoms[0].sigma + 2.0 * (PI - a)).abs() < 1e-15);
}

#[test]
fn counting_and_energy() {
    let a = 0.9;
    let constant = step(a, a, &[]);
    assert_eq!(constant.iota(), 0);
    assert_eq!(constant.eta(), 0.0);
    assert!(constant.is_simple());
    assert_eq!(step(a, -a, &[(0.0, 2.0 * PI)]).iota(), 2);
    let three = step(a, -a, &[(-1.0, 2.0 * a), (0.0, 2.0 * (PI - a)), (1.0, 2.0 * a)]);
    assert_eq!(three.iota(), 3);
    assert!(three.is_simple());
}

#[test]
fn transition_profile_of_simple_step() {
    let a = FRAC_PI_3;
    let s = step(a, -a, &[(-0.5, 2.0 * a), (0.2, 2.0 * PI - 2.0 * a)]);
    let (pos, d) = s.transition_profile().unwrap();
    assert_eq!(pos, vec![-0.5, 0.2]);
    assert_eq!(d, vec![Sign::Plus, Sign::Minus]);
    assert!((s.eta() - simple_energy(&s).unwrap()).abs() < 1e-14);
    // a falling jump of 2π - 2α is not reachable after a rise of 2α
    assert!(StepFunction::new(a, -a, vec![Jump { b: -0.5, size: 2.0 * a }, Jump { b: 0.2, size: -(2.0 * PI - 2.0 * a) }]).is_err());
}

#[test]
fn half_angle_left_limit_rule() {
    let s = step(FRAC_PI_2, -FRAC_PI_2, &[(0.0, PI)]);
    assert_eq!(s.transition_profile().unwrap().1, vec![Sign::Plus]);
    let s = step(FRAC_PI_2, FRAC_PI_2, &[(0.0, PI)]);
    assert_eq!(s.transition_profile().unwrap().1, vec![Sign::Minus]);
    let s = step(FRAC_PI_2, FRAC_PI_2, &[(0.0, -PI), (1.0, -PI)]);
    assert_eq!(s.transition_profile().unwrap().1, vec![Sign::Plus, Sign::Minus]);
}

#[test]
fn alternating_signs() {
    assert_eq!(alternating(3, Sign::Plus), vec![Sign::Plus, Sign::Minus, Sign::Plus]);
    assert_eq!(alternating(2, Sign::Minus), vec![Sign::Minus, Sign::Plus]);
    assert_eq!(alternating(1, Sign::Plus), vec![Sign::Plus]);
}

/// A simple step function with the given signs, starting from a random plateau.
fn simple_step(rng: &mut ChaCha8Rng) -> (StepFunction, Vec<Sign>) {
    let a = rng.gen_range(0.05..PI - 0.05);
    let n = rng.gen_range(0..8);
    let k = rng.gen_range(-2..3) as f64;
    let mut kind = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let base = 2.0 * PI * k + kind * a;
    let mut b = -1.0;
    let mut jumps = Vec::new();
    let mut signs = Vec::new();
    for _ in 0..n {
        b += rng.gen_range(0.01..1.0);
        let d = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        // from 2πk - α: +2α (d = 1) or -(2π - 2α) (d = -1); mirrored from 2πk + α
        let size = match (kind < 0.0, d) {
            (true, Sign::Plus) => 2.0 * a,
            (true, Sign::Minus) => -(2.0 * PI - 2.0 * a),
            (false, Sign::Plus) => -2.0 * a,
            (false, Sign::Minus) => 2.0 * PI - 2.0 * a,
        };
        jumps.push(Jump { b, size });
        signs.push(d);
        kind = -kind;
    }
    (StepFunction::new(a, base, jumps).unwrap(), signs)
}

#[test]
fn eta_equals_weighted_gamma_on_random_simple_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let (s, d) = simple_step(&mut rng);
        assert!(s.is_simple());
        let (_, got) = s.transition_profile().unwrap();
        if (s.alpha() - FRAC_PI_2).abs() > 1e-9 {
            assert_eq!(got, d);
        }
        let want = FRAC_PI_2 * gammas(&d, s.alpha()).total;
        assert!((s.eta() - want).abs() <= 1e-12, "{} {want}", s.eta());
    }
}

/// Same-sign splittings of `size` into atoms that keep every partial sum on the lattice
/// and satisfy the coincident-pair rule.
fn admissible_splittings(alpha: f64, base: f64, size: f64) -> Vec<Vec<f64>> {
    let sizes = [2.0 * alpha, 2.0 * PI - 2.0 * alpha];
    let dir = size.signum();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<f64>> = vec![vec![]];
    while let Some(seq) = stack.pop() {
        let sum: f64 = seq.iter().sum();
        if (sum - size).abs() < 1e-9 {
            out.push(seq);
            continue;
        }
        if sum.abs() > size.abs() + 1e-9 || seq.len() > 6 {
            continue;
        }
        for m in sizes {
            let s = dir * m;
            if let Some(last) = seq.last() {
                if ((last + s).abs() - 2.0 * PI).abs() > 1e-9 {
                    continue;
                }
            }
            if !on_lattice(base + sum + s, alpha) {
                continue;
            }
            let mut next = seq.clone();
            next.push(s);
            stack.push(next);
        }
    }
    out
}

#[test]
fn decomposition_is_unique() {
    for &a in &[0.4, 1.0, 2.0, 2.9] {
        for base in [-a, a] {
            for j in -2i32..=2 {
                for extra in [0.0, 2.0 * a, -2.0 * a] {
                    let size = 2.0 * PI * j as f64 + extra;
                    if size.abs() < 1e-12 || !on_lattice(base + size, a) {
                        continue;
                    }
                    let s = step(a, base, &[(0.0, size)]);
                    let atoms: Vec<f64> = s.decompose().unwrap().iter().map(|t| t.sigma).collect();
                    let all = admissible_splittings(a, base, size);
                    assert_eq!(all.len(), 1, "α={a} base={base} size={size}: {all:?}");
                    assert!(all[0].iter().zip(&atoms).all(|(x, y)| (x - y).abs() < 1e-12));
                }
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let s = step(FRAC_PI_3, -FRAC_PI_3, &[(-0.5, 2.0 * FRAC_PI_3), (0.2, 2.0 * PI - 2.0 * FRAC_PI_3)]);
    let text = serde_json::to_string(&s).unwrap();
    assert!(text.contains("\"alpha\"") && text.contains("\"base\"") && text.contains("\"jumps\""));
    let back: StepFunction = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    let bad = r#"{"alpha": 1.0, "base": 0.3, "jumps": []}"#;
    assert!(serde_json::from_str::<StepFunction>(bad).is_err());
    let path = std::env::temp_dir().join(format!("neel-step-{}.json", std::process::id()));
    s.write_json(&path).unwrap();
    assert_eq!(StepFunction::read_json(&path).unwrap(), s);
    std::fs::remove_file(&path).ok();
}

proptest! {
    #[test]
    fn recompose_round_trip(seed in 0u64..5000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rng.gen_range(0.05..PI - 0.05);
        let base = if rng.gen_bool(0.5) { a } else { -a };
        let mut v = base;
        let mut jumps = Vec::new();
        for i in 0..rng.gen_range(0..5) {
            let j = rng.gen_range(-2i32..=2) as f64;
            let options: Vec<f64> = [0.0, 2.0 * a, -2.0 * a]
                .iter()
                .map(|e| 2.0 * PI * j + e)
                .filter(|s| s.abs() > 1e-9 && on_lattice(v + s, a))
                .collect();
            if let Some(&size) = options.first() {
                jumps.push(Jump { b: i as f64, size });
                v += size;
            }
        }
        let s = StepFunction::new(a, base, jumps.clone()).unwrap();
        let atoms = s.decompose().unwrap();
        let back = StepFunction::recompose(a, base, &atoms).unwrap();
        prop_assert_eq!(back.jumps().len(), jumps.len());
        for (x, y) in back.jumps().iter().zip(&jumps) {
            prop_assert!((x.size - y.size).abs() < 1e-12 && x.b == y.b);
        }
        prop_assert!(s.eta() >= 0.0);
        prop_assert_eq!(s.eta() == 0.0, jumps.is_empty());
        let per_atom: f64 = atoms.iter().map(|t| FRAC_PI_2 * (1.0 - (t.sigma / 2.0).cos()).powi(2)).sum();
        prop_assert!((per_atom - s.eta()).abs() < 1e-12);
    }
}
