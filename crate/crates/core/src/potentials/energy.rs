use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{Model, WallConfig};
use crate::quad::{self, gauss_legendre, GaussRule};
use crate::renorm;
use crate::specfun::{self, QuadratureSpec, EULER_GAMMA};

use super::fields::{v_unconfined, wall_potential, Potential, StarField};

/// Tensor Gauss–Legendre grid in `(log ρ, θ)` around a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    /// Maximal panel width in `log ρ`.
    pub radial_step: f64,
    /// Uniform angular panels between the graded ends.
    pub angular_panels: usize,
    /// Gauss points per panel and direction.
    pub order: usize,
    /// Geometric refinement levels toward `θ = 0, π` (and toward `R` when graded).
    pub grading: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        Self { radial_step: 0.5, angular_panels: 4, order: 12, grading: 24 }
    }
}

impl PolarGrid {
    fn refined(&self) -> Self {
        Self {
            radial_step: self.radial_step * 0.5,
            angular_panels: self.angular_panels * 2,
            order: self.order + 4,
            grading: self.grading + 8,
        }
    }
}

fn graded_breaks(a: f64, b: f64, step: f64, grade_low: Option<usize>, grade_high: Option<usize>) -> Vec<f64> {
    let len = b - a;
    let n = ((len / step).ceil() as usize).max(1);
    let mut v: Vec<f64> = (0..=n).map(|i| a + len * i as f64 / n as f64).collect();
    let first = v[1] - v[0];
    if let Some(g) = grade_low {
        for k in 1..=g {
            v.push(a + first * 0.5f64.powi(k as i32));
        }
    }
    if let Some(g) = grade_high {
        for k in 1..=g {
            v.push(b - first * 0.5f64.powi(k as i32));
        }
    }
    v.sort_by(|x, y| x.total_cmp(y));
    v.dedup();
    v
}

fn tensor_points(breaks: &[f64], rule: &GaussRule) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(breaks.len() * rule.nodes.len());
    for w in breaks.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            out.push((c + h * x, h * wt));
        }
    }
    out
}

/// `∫ f(x) dx` over the half-annulus `r < |x - (c, 0)| < R`, `x2 > 0`.
pub fn polar_integral<F>(centre: f64, r: f64, big_r: f64, grid: &PolarGrid, grade_outer: bool, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if !(r > 0.0 && big_r > r) {
        return Err(NeelError::Domain(format!("annulus needs 0 < r < R, got {r}, {big_r}")));
    }
    let rule = gauss_legendre(grid.order);
    let sb = graded_breaks(r.ln(), big_r.ln(), grid.radial_step, None, grade_outer.then_some(grid.grading));
    let tb = graded_breaks(0.0, PI, PI / grid.angular_panels as f64, Some(grid.grading), Some(grid.grading));
    let sp = tensor_points(&sb, &rule);
    let tp = tensor_points(&tb, &rule);
    let row = |&(s, ws): &(f64, f64)| -> Result<f64> {
        let rho = s.exp();
        let mut acc = 0.0;
        for &(t, wt) in &tp {
            acc += wt * f(centre + rho * t.cos(), rho * t.sin())?;
        }
        Ok(acc * ws * rho * rho)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<f64>> = {
        use rayon::prelude::*;
        sp.par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<f64>> = sp.iter().map(row).collect();
    let mut acc = 0.0;
    for v in rows {
        acc += v?;
    }
    Ok(acc)
}

/// A quadrature value with a refinement-difference error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Dirichlet energy of a single-wall potential over the half-annulus around `(b, 0)`.
pub fn dirichlet_annulus(model: Model, b: f64, r: f64, big_r: f64, grid: &PolarGrid, tol: f64) -> Result<Estimate> {
    if model == Model::Confined && big_r > 1.0 - b.abs() + 1e-12 {
        return Err(NeelError::Domain("confined annulus must stay inside the film".into()));
    }
    let density = |x1: f64, x2: f64| -> Result<f64> {
        let [g1, g2] = wall_potential(model, Potential::U, b, x1, x2)?.grad();
        Ok(g1 * g1 + g2 * g2)
    };
    let grade = model == Model::Confined;
    let coarse = polar_integral(b, r, big_r, grid, grade, density)?;
    let fine = polar_integral(b, r, big_r, &grid.refined(), grade, density)?;
    let error = (fine - coarse).abs();
    if error > tol {
        return Err(NeelError::Accuracy { message: "annulus grid too coarse".into(), estimate: fine, error });
    }
    Ok(Estimate { value: fine, error })
}

/// The two summands of the cross-term identity and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    pub gradient_term: f64,
    pub boundary_term: f64,
    pub total: f64,
    pub error: f64,
}

/// `π ∫ t cos t/(b+t)² dt + bπ ∫ cos t/(b+t)² dt`, which equals `π I(b)`.
pub fn cross_term(b: f64, spec: &QuadratureSpec) -> Result<CrossTerm> {
    if !(b > 0.0) {
        return Err(NeelError::Domain(format!("cross term needs b > 0, got {b}")));
    }
    let g = quad::cosine_transform(|t| t / ((b + t) * (b + t)), spec.abs_tol, spec.max_depth);
    let h = quad::cosine_transform(|t| 1.0 / ((b + t) * (b + t)), spec.abs_tol, spec.max_depth);
    for r in [&g, &h] {
        if !r.converged {
            return Err(NeelError::Accuracy { message: "cross-term oscillatory sum".into(), estimate: r.value, error: r.error });
        }
    }
    let gradient_term = PI * g.value;
    let boundary_term = b * PI * h.value;
    Ok(CrossTerm {
        gradient_term,
        boundary_term,
        total: gradient_term + boundary_term,
        error: PI * (g.error + b * h.error),
    })
}

/// `∫_R |μ|²` for `μ(x) = Σ γ_n I(|x - a_n|)`.
fn trace_l2(positions: &[f64], gamma: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let mu = |x: f64| -> f64 {
        positions
            .iter()
            .zip(gamma)
            .map(|(a, g)| {
                let t = (x - a).abs();
                if t == 0.0 {
                    0.0
                } else {
                    g * specfun::eval_i(t, spec).map(|v| v.value).unwrap_or(f64::NAN)
                }
            })
            .sum()
    };
    let far = 400.0;
    let lo = positions[0] - far;
    let hi = positions[positions.len() - 1] + far;
    let mut breaks = vec![lo, hi];
    for a in positions {
        breaks.push(*a);
        for k in 0..30 {
            let d = 0.5f64.powi(k);
            breaks.push(a - d);
            breaks.push(a + d);
        }
        for d in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
            breaks.push(a - d);
            breaks.push(a + d);
        }
    }
    breaks.retain(|x| *x >= lo && *x <= hi);
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup();
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let r = quad::adaptive(|x| mu(x).powi(2), w[0], w[1], 1e-13, 1e-12, 30);
        if !r.value.is_finite() {
            return Err(NeelError::Accuracy { message: "trace integral".into(), estimate: r.value, error: r.error });
        }
        acc += r.value;
    }
    // μ ~ (Σγ)/x² beyond the cut-off on both sides
    let s: f64 = gamma.iter().sum();
    acc += 2.0 * s * s / (3.0 * far.powi(3));
    Ok(acc)
}

/// `∫ v(x1, 0)² dx1` for the single unconfined wall; equals `π`.
pub fn boundary_l2(spec: &QuadratureSpec) -> Result<f64> {
    trace_l2(&[0.0], &[1.0], spec)
}

/// Fit `q(r) ≈ L + c1 r log(1/r) + c2 r` and return `L`.
pub fn extrapolate_to_zero(samples: &[(f64, f64)]) -> Result<f64> {
    let m = samples.len();
    if m < 2 {
        return Err(NeelError::Domain("extrapolation needs at least two radii".into()));
    }
    let cols = m.min(3);
    let a = DMatrix::from_fn(m, cols, |i, j| {
        let r = samples[i].0;
        match j {
            0 => 1.0,
            1 => r * (1.0 / r).ln(),
            _ => r,
        }
    });
    let b = DVector::from_iterator(m, samples.iter().map(|s| s.1));
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).map_err(|e| NeelError::Domain(e.to_string()))?;
    Ok(x[0])
}

/// Per-radius brackets and their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// `(r, bracketed quantity)`.
    pub brackets: Vec<(f64, f64)>,
    pub extrapolated: f64,
    /// Closed-form value the limit is compared against.
    pub reference: f64,
}

/// Far-field radius of the 2D integrals.
const FAR: f64 = 1e3;

fn check_radii(r_sequence: &[f64]) -> Result<()> {
    if r_sequence.is_empty() || r_sequence.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err(NeelError::Domain("radii must lie in (0, 1)".into()));
    }
    if r_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(NeelError::Domain("radii must be decreasing".into()));
    }
    Ok(())
}

/// `∫_{R²₊ \ B_r} |∇v|² + ∫ v(·,0)² - π log(1/r)` for each `r`, extrapolated to `r → 0`.
pub fn near_wall_energy(r_sequence: &[f64], grid: &PolarGrid, spec: &QuadratureSpec) -> Result<LimitEstimate> {
    check_radii(r_sequence)?;
    let trace = boundary_l2(spec)?;
    let density = |x1: f64, x2: f64| -> Result<f64> {
        let [g1, g2] = v_unconfined(x1, x2)?.grad();
        Ok(g1 * g1 + g2 * g2)
    };
    let mut brackets = Vec::new();
    for &r in r_sequence {
        let e = polar_integral(0.0, r, FAR, grid, false, density)? + FRAC_PI_2 / (FAR * FAR);
        brackets.push((r, e + trace - PI * (1.0 / r).ln()));
    }
    let extrapolated = extrapolate_to_zero(&brackets)?;
    Ok(LimitEstimate { brackets, extrapolated, reference: -PI * EULER_GAMMA })
}

/// Tail energy `W_1` of an unconfined configuration from its defining limit.
pub fn w1_unconfined(config: &WallConfig, r_sequence: &[f64], grid: &PolarGrid, spec: &QuadratureSpec) -> Result<LimitEstimate> {
    if config.model() != Model::Unconfined || config.is_empty() {
        return Err(NeelError::InvalidConfig("W_1 needs a nonempty unconfined configuration".into()));
    }
    check_radii(r_sequence)?;
    let a = config.positions().to_vec();
    let gm = config.gammas();
    if r_sequence[0] >= config.rho() {
        return Err(NeelError::Domain("radii must be below half the minimal gap".into()));
    }
    let field = StarField::new(config);
    let trace = trace_l2(&a, &gm.gamma, spec)?;
    let sum_g: f64 = gm.gamma.iter().sum();
    let mut brackets = Vec::new();
    for &r in r_sequence {
        let mut e = 0.0;
        for (n, &an) in a.iter().enumerate() {
            let a_ref = &a;
            let density = |x1: f64, x2: f64| -> Result<f64> {
                let mut own = 0.0;
                let mut total = 0.0;
                for (k, ak) in a_ref.iter().enumerate() {
                    let d2 = (x1 - ak).powi(2) + x2 * x2;
                    if k != n && d2 < r * r {
                        return Ok(0.0);
                    }
                    let wgt = 1.0 / (d2 * d2);
                    total += wgt;
                    if k == n {
                        own = wgt;
                    }
                }
                let [g1, g2] = field.v_star(x1, x2)?.grad();
                Ok(own / total * (g1 * g1 + g2 * g2))
            };
            e += polar_integral(an, r, FAR, grid, false, density)?;
        }
        e += FRAC_PI_2 * sum_g * sum_g / (FAR * FAR);
        brackets.push((r, 0.5 * (e + trace - PI * (1.0 / r).ln() * gm.total)));
    }
    let extrapolated = extrapolate_to_zero(&brackets)?;
    let reference = -renorm::w_unconfined(config, spec)?.value;
    Ok(LimitEstimate { brackets, extrapolated, reference })
}

/// Closed form `(π/2) I_0 Σγ² + (π/2) ΣΣ γ_k γ_n I(|a_k - a_n|)`.
pub fn w1_closed_form(config: &WallConfig, spec: &QuadratureSpec) -> Result<f64> {
    Ok(-renorm::w_unconfined(config, spec)?.value)
}

/// Rectangle of stencil centres for finite-difference checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualGrid {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    /// Stencil spacing.
    pub h: f64,
    /// Number of centres per direction.
    pub samples: usize,
}

impl ResidualGrid {
    fn centres(&self) -> Vec<(f64, f64)> {
        let n = self.samples.max(2);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = self.x1.0 + (self.x1.1 - self.x1.0) * i as f64 / (n - 1) as f64;
                let y = self.x2.0 + (self.x2.1 - self.x2.0) * j as f64 / (n - 1) as f64;
                out.push((x, y));
            }
        }
        out
    }
}

/// Max over centres of `|Δ_h f| / max(|f_xx|, |f_yy|)` with the 5-point stencil.
pub fn harmonicity_residual<F: Fn(f64, f64) -> Result<f64>>(f: F, grid: &ResidualGrid) -> Result<f64> {
    let h = grid.h;
    let mut worst = 0.0f64;
    for (x, y) in grid.centres() {
        let c = f(x, y)?;
        let fxx = (f(x + h, y)? - 2.0 * c + f(x - h, y)?) / (h * h);
        let fyy = (f(x, y + h)? - 2.0 * c + f(x, y - h)?) / (h * h);
        let scale = fxx.abs().max(fyy.abs()).max(1e-300);
        worst = worst.max((fxx + fyy).abs() / scale);
    }
    Ok(worst)
}

/// Max over centres of `|∂₁v + ∂₂u|` and `|∂₂v - ∂₁u|` (central differences).
pub fn conjugacy_residual<U, V>(u: U, v: V, grid: &ResidualGrid) -> Result<f64>
where
    U: Fn(f64, f64) -> Result<f64>,
    V: Fn(f64, f64) -> Result<f64>,
{
    let h = grid.h;
    let mut worst = 0.0f64;
    for (x, y) in grid.centres() {
        let u1 = (u(x + h, y)? - u(x - h, y)?) / (2.0 * h);
        let u2 = (u(x, y + h)? - u(x, y - h)?) / (2.0 * h);
        let v1 = (v(x + h, y)? - v(x - h, y)?) / (2.0 * h);
        let v2 = (v(x, y + h)? - v(x, y - h)?) / (2.0 * h);
        worst = worst.max((v1 + u2).abs()).max((v2 - u1).abs());
    }
    Ok(worst)
}
