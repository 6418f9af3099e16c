//! Acceptance criteria as runnable checks.
//!
//! Each criterion returns measured values next to their expected values and
//! tolerances. Criteria are grouped into suites by module.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{gammas, Model, Sign, WallConfig};
use crate::micromag::{
    fit_expansion, paired_fit, sample_energies, stray_energy_double_integral, stray_energy_spectral, Grid1D,
    SimulationParams,
};
use crate::potentials::{
    boundary_l2, conjugacy_residual, cross_term, dirichlet_annulus, extrapolate_to_zero, harmonicity_residual,
    near_wall_energy, u_confined, u_unconfined, v_confined, v_unconfined, w1_unconfined, PolarGrid, ResidualGrid,
};
use crate::profiles::{alternating, Jump, StepFunction};
use crate::renorm::{
    critical_point_n3, minimize_w, multi_start_minimize, positive_subblock, renormalised_energy, scan_path,
    CollapsePath, MinimizeOptions, MinimizeStatus,
};
use crate::specfun::{derivative_ratio, eval_i, eval_i0, eval_i_alt, ratio_root, QuadratureSpec};

/// One measured quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    /// `"abs"`, `"rel"`, `"max"` (measured ≤ expected + tolerance) or `"flag"`.
    pub kind: String,
    pub pass: bool,
    /// Reported only; does not decide the criterion.
    #[serde(default)]
    pub informational: bool,
}

impl Check {
    pub fn abs(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self::make(label, measured, expected, tolerance, "abs", pass)
    }

    pub fn rel(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance * expected.abs();
        Self::make(label, measured, expected, tolerance, "rel", pass)
    }

    pub fn at_most(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::make(label, measured, bound, 0.0, "max", measured <= bound)
    }

    pub fn flag(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self::make(label, v, 1.0, 0.0, "flag", ok)
    }

    fn make(label: impl Into<String>, measured: f64, expected: f64, tolerance: f64, kind: &str, pass: bool) -> Self {
        Self {
            label: label.into(),
            measured,
            expected,
            tolerance,
            kind: kind.into(),
            pass: pass && measured.is_finite(),
            informational: false,
        }
    }

    fn info(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Static description of a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub suite: &'static str,
    pub title: &'static str,
    /// Runtime budget in seconds.
    pub budget: f64,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, suite: "specfun", title: "kernel constant, bounds and alternative form", budget: 5.0 },
    Criterion { id: 2, suite: "specfun", title: "derivative ratio monotonicity and inverse", budget: 5.0 },
    Criterion { id: 3, suite: "potentials", title: "cross-term identity", budget: 10.0 },
    Criterion { id: 4, suite: "potentials", title: "near-wall energy", budget: 120.0 },
    Criterion { id: 5, suite: "potentials", title: "first-order sign relation", budget: 120.0 },
    Criterion { id: 6, suite: "renorm", title: "renormalised-energy landscape", budget: 30.0 },
    Criterion { id: 7, suite: "renorm", title: "repulsion and attraction signs", budget: 1.0 },
    Criterion { id: 8, suite: "micromag", title: "stray-energy evaluators agree", budget: 30.0 },
    Criterion { id: 9, suite: "micromag", title: "full-energy expansion trend", budget: 900.0 },
    Criterion { id: 10, suite: "profiles", title: "step-function decomposition", budget: 1.0 },
    Criterion { id: 11, suite: "potentials", title: "potential validity and annulus bands", budget: 120.0 },
];

pub const SUITES: [&str; 6] = ["specfun", "renorm", "potentials", "micromag", "profiles", "all"];

/// Knobs for the expensive criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcceptanceOptions {
    /// Grid size of the full-energy fits.
    pub nodes: usize,
    pub seed: u64,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        Self { nodes: 1 << 14, seed: 7 }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub suite: String,
    pub title: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub budget: f64,
    /// Set when a computation failed outright.
    pub error: Option<String>,
    pub pass: bool,
}

impl CriterionReport {
    /// `PASS`/`FAIL` line with the decisive numbers.
    pub fn summary(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("{status} criterion {:>2} [{}] {} ({:.2} s)", self.id, self.suite, self.title, self.seconds);
        if let Some(e) = &self.error {
            s.push_str(&format!(": error: {e}"));
        }
        let failed: Vec<&str> = self.checks.iter().filter(|c| !c.pass && !c.informational).map(|c| c.label.as_str()).collect();
        if !failed.is_empty() {
            s.push_str(&format!(": failed {}", failed.join("; ")));
        }
        s
    }
}

pub fn criterion(id: u8) -> Result<Criterion> {
    CRITERIA
        .iter()
        .find(|c| c.id == id)
        .copied()
        .ok_or_else(|| NeelError::InvalidConfig(format!("no acceptance criterion {id}")))
}

/// Runs one criterion; computation errors become a failed report.
pub fn run_criterion(id: u8, opts: &AcceptanceOptions) -> Result<CriterionReport> {
    let c = criterion(id)?;
    let start = Instant::now();
    let outcome = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(opts),
        7 => c7(),
        8 => c8(opts),
        9 => c9(opts),
        10 => c10(opts),
        _ => c11(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut checks, error) = match outcome {
        Ok(v) => (v, None),
        Err(e) => (vec![], Some(e.to_string())),
    };
    checks.push(Check::at_most("runtime [s]", seconds, c.budget).info());
    let pass = error.is_none() && checks.iter().all(|k| k.pass || k.informational);
    Ok(CriterionReport {
        id,
        suite: c.suite.into(),
        title: c.title.into(),
        checks,
        seconds,
        budget: c.budget,
        error,
        pass,
    })
}

/// Criterion ids of a suite; `"all"` selects every criterion.
pub fn suite_ids(suite: &str) -> Result<Vec<u8>> {
    if !SUITES.contains(&suite) {
        return Err(NeelError::InvalidConfig(format!("unknown suite '{suite}', expected one of {}", SUITES.join(", "))));
    }
    Ok(CRITERIA.iter().filter(|c| suite == "all" || c.suite == suite).map(|c| c.id).collect())
}

pub fn run_suite(suite: &str, opts: &AcceptanceOptions) -> Result<Vec<CriterionReport>> {
    suite_ids(suite)?.into_iter().map(|id| run_criterion(id, opts)).collect()
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn c1() -> Result<Vec<Check>> {
    let s = spec();
    let mut out = vec![Check::abs("I0", eval_i0(&s)?.value, -0.577_215_664_9, 1e-8)];
    let mut worst: f64 = f64::NEG_INFINITY;
    for t in log_space(1e-4, 10.0, 40) {
        let r = eval_i(t, &s)?.value + t.ln() - eval_i0(&s)?.value;
        worst = worst.max(-r).max(r - PI * t / 2.0);
    }
    out.push(Check::at_most("sandwich violation over 40 t in [1e-4, 10]", worst, 0.0));
    let mut worst: f64 = f64::NEG_INFINITY;
    for t in log_space(0.1, 100.0, 40) {
        worst = worst.max(eval_i(t, &s)?.value * t * t - 1.0);
    }
    out.push(Check::at_most("max t^2 I(t) - 1 on [0.1, 100]", worst, 0.0));
    let mut diff: f64 = 0.0;
    for t in [0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0] {
        diff = diff.max((eval_i(t, &s)?.value - eval_i_alt(t, &s)?.value).abs());
    }
    out.push(Check::abs("max |I - I_alt| at 7 points", diff, 0.0, 1e-6));
    Ok(out)
}

fn c2() -> Result<Vec<Check>> {
    let s = spec();
    let ts = log_space(1e-3, 1e3, 61);
    let q: Vec<f64> = ts.iter().map(|&t| derivative_ratio(t, &s)).collect::<Result<_>>()?;
    let decreasing = q.windows(2).all(|w| w[1] < w[0]);
    let mut out = vec![
        Check::flag("ratio strictly decreasing on 61 points", decreasing),
        Check::rel("ratio at t = 1e-3", q[0], 0.5, 0.02),
        Check::rel("ratio at t = 1e3", q[q.len() - 1], 0.125, 0.02),
    ];
    let mut worst: f64 = 0.0;
    for &t in &[2e-3, 0.05, 0.3, 1.0, 4.0, 30.0, 300.0] {
        let back = ratio_root(derivative_ratio(t, &s)?, &s)?;
        worst = worst.max((back - t).abs() / t);
    }
    out.push(Check::abs("ratio_root round trip (relative)", worst, 0.0, 1e-6));
    Ok(out)
}

fn c3() -> Result<Vec<Check>> {
    let s = spec();
    [0.25, 0.5, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|&b| {
            let c = cross_term(b, &s)?;
            Ok(Check::rel(format!("cross term b = {b}"), c.total, PI * eval_i(b, &s)?.value, 1e-5))
        })
        .collect()
}

fn c4() -> Result<Vec<Check>> {
    let s = spec();
    let e = near_wall_energy(&[0.2, 0.1, 0.05], &PolarGrid::default(), &s)?;
    Ok(vec![
        Check::abs("trace L2 energy", boundary_l2(&s)?, PI, 1e-4),
        Check::rel("extrapolated near-wall quantity", e.extrapolated, PI * eval_i0(&s)?.value, 0.05),
    ])
}

fn c5() -> Result<Vec<Check>> {
    let s = spec();
    let mut out = vec![];
    for (a, d) in [(vec![0.0], vec![Sign::Plus]), (vec![0.0, 1.0], vec![Sign::Plus, Sign::Minus])] {
        let n = a.len();
        let c = WallConfig::new(Model::Unconfined, FRAC_PI_2, a, d)?;
        let e = w1_unconfined(&c, &[0.2, 0.1, 0.05], &PolarGrid::default(), &s)?;
        let w = renormalised_energy(&c)?.value;
        out.push(Check::rel(format!("W1 vs -W, N = {n}"), e.extrapolated, -w, 0.05));
    }
    Ok(out)
}

fn c6(opts: &AcceptanceOptions) -> Result<Vec<Check>> {
    let mo = MinimizeOptions::default();
    let mut out = vec![];
    // (a)
    for (n, start) in [(2, vec![-0.7, 0.1]), (3, vec![-0.6, 0.1, 0.3])] {
        let c = WallConfig::new(Model::Confined, FRAC_PI_2, start, alternating(n, Sign::Plus))?;
        let r = minimize_w(&c, &mo)?;
        let interior = r.argmin.iter().all(|a| a.abs() < 1.0);
        out.push(Check::flag(format!("(a) N = {n} converged to an interior point"), r.status == MinimizeStatus::Converged && interior));
        out.push(Check::at_most(format!("(a) N = {n} gradient"), r.gradient_norm, 1e-8));
    }
    // (b)
    let d = alternating(3, Sign::Minus);
    let c = WallConfig::new(Model::Confined, 0.2, vec![-0.5, 0.0, 0.5], d)?;
    let r = minimize_w(&c, &mo)?;
    out.push(Check::flag("(b) reported diverging to -inf", r.status == MinimizeStatus::DivergingToMinusInfinity));
    let (k, l) = positive_subblock(c.signs(), 0.2)
        .ok_or_else(|| NeelError::Domain("no collapsing sub-block at α = 0.2".into()))?;
    let etas: Vec<f64> = (0..13).map(|i| 10f64.powi(-i)).collect();
    let scan = scan_path(&c, CollapsePath::SubBlock { first: k, last: l }, &etas)?;
    out.push(Check::flag("(b) W decreasing along the collapse path", scan.windows(2).all(|p| p[1].w < p[0].w)));
    out.push(Check::at_most("(b) W at collapse parameter 1e-12", scan[scan.len() - 1].w, -100.0));
    // (c)
    let alpha = (-0.5f64).acos();
    let d = alternating(3, Sign::Plus);
    match critical_point_n3(alpha, &d, &spec())? {
        Some(cp) => {
            out.push(Check::at_most("(c) critical point gradient", cp.gradient_norm, 1e-6));
            let p = &cp.positions;
            out.push(Check::abs("(c) equidistance", (p[2] - p[1]) - (p[1] - p[0]), 0.0, 1e-12));
        }
        None => out.push(Check::flag("(c) critical point exists", false)),
    }
    let c = WallConfig::new(Model::Unconfined, alpha, vec![0.0, 1.0, 2.0], d)?;
    let runs = multi_start_minimize(&c, 8, opts.seed, &mo)?;
    let conv = runs.iter().filter(|r| r.status == MinimizeStatus::Converged).count();
    out.push(Check::abs("(c) multi-start runs converging to a minimiser", conv as f64, 0.0, 0.0));
    // (d) the outermost wall with d·cos α ≥ 0 is pushed away from its neighbour
    let mut stationary = 0usize;
    let mut non_monotone = 0usize;
    let mut cases = 0usize;
    for n in [2usize, 4, 6] {
        for &alpha in &[0.5, 1.0, 2.0, 2.6] {
            for first in [Sign::Plus, Sign::Minus] {
                let d = alternating(n, first);
                let a: Vec<f64> = (0..n).map(|i| 0.7 * i as f64).collect();
                let c = WallConfig::new(Model::Unconfined, alpha, a.clone(), d.clone())?;
                if minimize_w(&c, &mo)?.status == MinimizeStatus::Converged {
                    stationary += 1;
                }
                let weak = if d[0].value() * alpha.cos() >= 0.0 { 0 } else { n - 1 };
                let mut w = Vec::with_capacity(30);
                for k in 0..30 {
                    let g = 0.01 * 1.4f64.powi(k);
                    let mut p = a.clone();
                    if weak == 0 {
                        p[0] = a[1] - g;
                    } else {
                        p[n - 1] = a[n - 2] + g;
                    }
                    w.push(renormalised_energy(&c.with_positions(p)?)?.value);
                }
                if !w.windows(2).all(|p| p[1] < p[0]) {
                    non_monotone += 1;
                }
                cases += 1;
            }
        }
    }
    out.push(Check::abs(format!("(d) even N: stationary points found in {cases} runs"), stationary as f64, 0.0, 0.0));
    out.push(Check::abs(format!("(d) even N: non-monotone outer-gap scans of {cases}"), non_monotone as f64, 0.0, 0.0));
    Ok(out)
}

fn c7() -> Result<Vec<Check>> {
    let mut wrong = 0usize;
    let mut total = 0usize;
    for model in [Model::Confined, Model::Unconfined] {
        for &alpha in &[0.5, 1.0, FRAC_PI_2, 2.0, 2.6] {
            for &centre in &[-0.3, 0.0, 0.25] {
                for &gap in &[0.01, 0.05, 0.1] {
                    for same in [false, true] {
                        let d = if same { vec![Sign::Plus, Sign::Plus] } else { vec![Sign::Plus, Sign::Minus] };
                        let w = |g: f64| -> Result<f64> {
                            let c = WallConfig::new(model, alpha, vec![centre - g / 2.0, centre + g / 2.0], d.clone())?;
                            Ok(renormalised_energy(&c)?.value)
                        };
                        let (near, far) = (w(gap / 2.0)?, w(gap)?);
                        total += 1;
                        if same != (near < far) {
                            wrong += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(vec![Check::abs(format!("pairs with the wrong sign of change out of {total}"), wrong as f64, 0.0, 0.0)])
}

fn random_bumps(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let k = rng.gen_range(1..4);
    let bumps: Vec<(f64, f64, f64)> =
        (0..k).map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(0.1..0.4), rng.gen_range(-1.0..1.0))).collect();
    (0..n)
        .map(|i| {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            bumps
                .iter()
                .map(|(c, w, a)| {
                    let t = (x - c) / w;
                    if t.abs() < 1.0 { a * (1.0 - t * t).powi(3) } else { 0.0 }
                })
                .sum()
        })
        .collect()
}

fn c8(opts: &AcceptanceOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = random_bumps(&mut rng, 2048);
        let s = stray_energy_spectral(&f, 4)?.energy;
        let d = stray_energy_double_integral(&f).energy;
        worst = worst.max((s - d).abs() / d);
    }
    let g = Grid1D::new(-40.0, 40.0, 8192)?;
    let f: Vec<f64> = g.nodes().iter().map(|x| (-x.abs()).exp()).collect();
    Ok(vec![
        Check::abs("max relative gap on 20 random profiles", worst, 0.0, 0.01),
        Check::rel("seminorm^2 of exp(-|x|), spectral", stray_energy_spectral(&f, 4)?.seminorm_sq, 2.0 / PI, 0.01),
        Check::rel("seminorm^2 of exp(-|x|), double integral", stray_energy_double_integral(&f).seminorm_sq, 2.0 / PI, 0.01),
    ])
}

fn c9(opts: &AcceptanceOptions) -> Result<Vec<Check>> {
    let eps = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let params = SimulationParams { nodes: opts.nodes, ..SimulationParams::default() };
    let at = |a: f64| WallConfig::new(Model::Confined, FRAC_PI_2, vec![a], vec![Sign::Plus]);
    let (c1, c2) = (at(0.0)?, at(0.5)?);
    let p1 = sample_energies(&c1, &eps, &params)?;
    let p2 = sample_energies(&c2, &eps, &params)?;
    let f1 = fit_expansion(&c1, &p1)?;
    let f2 = fit_expansion(&c2, &p2)?;
    let joint = paired_fit((&c1, &p1), (&c2, &p2))?;
    Ok(vec![
        Check::rel("leading coefficient A (a = 0)", f1.a, FRAC_PI_2, 0.15),
        Check::rel("B(0) - B(0.5), joint fit", joint.delta_b, joint.delta_w, 0.30),
        Check::rel("B(0) - B(0.5), two-term fits", f1.b - f2.b, f1.w - f2.w, 0.30).info(),
    ])
}

fn step(alpha: f64, base: f64, jumps: &[(f64, f64)]) -> Result<StepFunction> {
    StepFunction::new(alpha, base, jumps.iter().map(|&(b, size)| Jump { b, size }).collect())
}

fn c10(opts: &AcceptanceOptions) -> Result<Vec<Check>> {
    let mut out = vec![];
    let a = PI / 4.0;
    let s = step(a, -a, &[(0.0, 2.0 * PI)])?;
    let atoms = s.decompose()?;
    out.push(Check::flag(
        "2π jump at α = π/4 splits into π/2 and 3π/2",
        atoms.len() == 2 && (atoms[0].sigma - FRAC_PI_2).abs() < 1e-15 && (atoms[1].sigma - 1.5 * PI).abs() < 1e-15,
    ));
    out.push(Check::abs("η of the 2π jump", s.eta(), 1.5 * PI, 1e-14));
    out.push(Check::abs("ι of the 2π jump", s.iota() as f64, 2.0, 0.0));
    out.push(Check::flag("2π jump is not simple", !s.is_simple()));
    let a = 0.7;
    out.push(Check::abs("atoms of +2α", step(a, -a, &[(0.0, 2.0 * a)])?.decompose()?.len() as f64, 1.0, 0.0));
    out.push(Check::abs(
        "atoms of -(2π - 2α)",
        step(a, -a, &[(0.0, -(2.0 * PI - 2.0 * a))])?.decompose()?.len() as f64,
        1.0,
        0.0,
    ));
    out.push(Check::abs("ι of a constant", step(a, a, &[])?.iota() as f64, 0.0, 0.0));
    let three = step(a, -a, &[(-1.0, 2.0 * a), (0.0, 2.0 * (PI - a)), (1.0, 2.0 * a)])?;
    out.push(Check::abs("ι of three separated jumps", three.iota() as f64, 3.0, 0.0));
    let a = PI / 3.0;
    let s = step(a, -a, &[(-0.5, 2.0 * a), (0.2, 2.0 * PI - 2.0 * a)])?;
    out.push(Check::flag("transition signs (1, -1)", s.transition_profile()?.1 == vec![Sign::Plus, Sign::Minus]));
    let s = step(FRAC_PI_2, -FRAC_PI_2, &[(0.0, PI)])?;
    out.push(Check::flag("α = π/2 jump +π from -π/2 has sign +1", s.transition_profile()?.1 == vec![Sign::Plus]));
    out.push(Check::flag(
        "alternating sign vectors",
        alternating(3, Sign::Plus) == [Sign::Plus, Sign::Minus, Sign::Plus]
            && alternating(2, Sign::Minus) == [Sign::Minus, Sign::Plus]
            && alternating(1, Sign::Plus) == [Sign::Plus],
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    let mut recovered = true;
    for _ in 0..100 {
        let (s, d) = random_simple_step(&mut rng)?;
        let (_, got) = s.transition_profile()?;
        if (s.alpha() - FRAC_PI_2).abs() > 1e-9 {
            recovered &= got == d;
        }
        worst = worst.max((s.eta() - FRAC_PI_2 * gammas(&d, s.alpha()).total).abs());
    }
    out.push(Check::flag("random simple steps recover their signs", recovered));
    out.push(Check::abs("max |η - (π/2)Γ| over 100 random simple steps", worst, 0.0, 1e-12));
    Ok(out)
}

fn random_simple_step(rng: &mut ChaCha8Rng) -> Result<(StepFunction, Vec<Sign>)> {
    let a = rng.gen_range(0.05..PI - 0.05);
    let n = rng.gen_range(1..8);
    let k = rng.gen_range(-2..3) as f64;
    let mut lower = rng.gen_bool(0.5);
    let base = 2.0 * PI * k + if lower { -a } else { a };
    let mut b = -1.0;
    let mut jumps = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for _ in 0..n {
        b += rng.gen_range(0.01..1.0);
        let d = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let size = match (lower, d) {
            (true, Sign::Plus) => 2.0 * a,
            (true, Sign::Minus) => -(2.0 * PI - 2.0 * a),
            (false, Sign::Plus) => -2.0 * a,
            (false, Sign::Minus) => 2.0 * PI - 2.0 * a,
        };
        jumps.push(Jump { b, size });
        signs.push(d);
        lower = !lower;
    }
    Ok((StepFunction::new(a, base, jumps)?, signs))
}

fn c11() -> Result<Vec<Check>> {
    let mut out = vec![];
    let g = ResidualGrid { x1: (0.5, 2.0), x2: (0.5, 2.0), h: 1e-3, samples: 12 };
    let hv = harmonicity_residual(|x, y| Ok(v_unconfined(x, y)?.value), &g)?;
    let hu = harmonicity_residual(|x, y| Ok(u_unconfined(x, y)?.value), &g)?;
    let cu = conjugacy_residual(|x, y| Ok(u_unconfined(x, y)?.value), |x, y| Ok(v_unconfined(x, y)?.value), &g)?;
    out.push(Check::at_most("unconfined harmonicity of v", hv, 1e-3));
    out.push(Check::at_most("unconfined harmonicity of u", hu, 1e-3));
    out.push(Check::at_most("unconfined conjugacy", cu, 1e-3));
    let g = ResidualGrid { x1: (-0.8, 0.8), x2: (0.1, 0.9), h: 1e-3, samples: 12 };
    let hv = harmonicity_residual(|x, y| Ok(v_confined(x, y)?.value), &g)?;
    let hu = harmonicity_residual(|x, y| Ok(u_confined(x, y)?.value), &g)?;
    let cc = conjugacy_residual(|x, y| Ok(u_confined(x, y)?.value), |x, y| Ok(v_confined(x, y)?.value), &g)?;
    out.push(Check::at_most("confined harmonicity of v", hv, 1e-3));
    out.push(Check::at_most("confined harmonicity of u", hu, 1e-3));
    out.push(Check::at_most("confined conjugacy", cc, 1e-3));
    let mut umax: f64 = 0.0;
    for i in 0..81 {
        for j in 0..41 {
            let x1 = -4.0 + 0.1 * i as f64;
            let x2 = if j == 0 { 0.0 } else { 10f64.powf(-4.0 + 0.125 * j as f64) };
            if x1.abs() > 1e-12 || x2 > 0.0 {
                umax = umax.max(u_unconfined(x1, x2)?.value.abs());
            }
            umax = umax.max(u_confined(x1 + 0.05, x2)?.value.abs());
        }
    }
    out.push(Check::at_most("max |u| over sampled points", umax, FRAC_PI_2 + 1e-12));
    let grid = PolarGrid::default();
    let upper = FRAC_PI_2 * 76f64.ln();
    for model in [Model::Confined, Model::Unconfined] {
        let mut offsets = vec![];
        for &r in &[0.1, 0.03, 0.01] {
            let e = dirichlet_annulus(model, 0.0, r, 1.0, &grid, 1e-4)?;
            offsets.push((r, e.value - PI * (1.0 / r).ln()));
        }
        let c = -extrapolate_to_zero(&offsets)?;
        for (r, o) in &offsets {
            out.push(Check::at_most(format!("{model} annulus offset at r = {r} (upper band)"), *o, upper));
            out.push(Check::at_most(format!("{model} annulus offset at r = {r} (lower band, -offset vs C)"), -o, c + 1e-3));
        }
    }
    Ok(out)
}
