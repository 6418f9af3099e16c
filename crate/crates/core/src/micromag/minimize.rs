use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::stray::StrayOperator;
use super::{EnergyBreakdown, Grid1D, MagnetizationProfile, SimulationParams};
use crate::error::{NeelError, Result};
use crate::geometry::{Model, Sign, WallConfig};
use crate::renorm;

/// Plateau values `p₀, …, p_N` in `2πℤ ± α` and the pinned values `φ(aₙ) ∈ πℤ`.
///
/// The first plateau is `-α` for `d₁ = +1` and `α` otherwise; each wall moves
/// to the next plateau through the multiple of `π` with `cos = dₙ`.
pub fn plateau_values(signs: &[Sign], alpha: f64) -> (Vec<f64>, Vec<f64>) {
    // plateau 2πk + s·α with s = ±1
    let (mut k, mut s): (i64, f64) = match signs.first() {
        Some(Sign::Minus) => (0, 1.0),
        _ => (0, -1.0),
    };
    let value = |k: i64, s: f64| 2.0 * PI * k as f64 + s * alpha;
    let mut plateaus = vec![value(k, s)];
    let mut pins = Vec::with_capacity(signs.len());
    for d in signs {
        let base = 2.0 * PI * k as f64;
        match (s < 0.0, d) {
            (true, Sign::Plus) => pins.push(base),
            (true, Sign::Minus) => {
                pins.push(base - PI);
                k -= 1;
            }
            (false, Sign::Plus) => pins.push(base),
            (false, Sign::Minus) => {
                pins.push(base + PI);
                k += 1;
            }
        }
        s = -s;
        plateaus.push(value(k, s));
    }
    (plateaus, pins)
}

/// Nodes held fixed during the descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub fixed: Vec<(usize, f64)>,
}

impl Constraints {
    fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![true; n];
        for (i, _) in &self.fixed {
            m[*i] = false;
        }
        m
    }

    fn impose(&self, phi: &mut [f64]) {
        for (i, v) in &self.fixed {
            phi[*i] = *v;
        }
    }
}

fn grid_for(config: &WallConfig, params: &SimulationParams) -> Result<Grid1D> {
    match config.model() {
        Model::Confined => Grid1D::new(-1.0, 1.0, params.nodes),
        Model::Unconfined => {
            let a = config.positions();
            let (lo, hi) = match (a.first(), a.last()) {
                (Some(l), Some(h)) => (*l, *h),
                _ => (0.0, 0.0),
            };
            let half = params.half_width.unwrap_or_else(|| (10.0 * (hi - lo)).max(10.0));
            if half <= 0.5 * (hi - lo) {
                return Err(NeelError::InvalidConfig("window does not contain the walls".into()));
            }
            let c = 0.5 * (lo + hi);
            Grid1D::new(c - half, c + half, params.nodes)
        }
    }
}

fn constraints_for(config: &WallConfig, grid: &Grid1D, params: &SimulationParams) -> Result<(Constraints, Vec<f64>)> {
    let (plateaus, pins) = plateau_values(config.signs(), config.alpha());
    let n = grid.n;
    let mut fixed = vec![(0, plateaus[0]), (n - 1, plateaus[plateaus.len() - 1])];
    let mut last: Option<usize> = None;
    for (a, p) in config.positions().iter().zip(&pins) {
        let i = grid.nearest(*a);
        if i < params.pin_separation || i + params.pin_separation >= n {
            return Err(NeelError::InvalidConfig(format!("wall at {a} is within {} cells of the boundary", params.pin_separation)));
        }
        if let Some(j) = last {
            if i < j + params.pin_separation {
                return Err(NeelError::InvalidConfig(format!(
                    "walls must be at least {} cells apart; refine the grid",
                    params.pin_separation
                )));
            }
        }
        last = Some(i);
        fixed.push((i, *p));
    }
    Ok((Constraints { fixed }, plateaus))
}

/// Arctan transitions of width `δ` between the plateaus, with the pinned and end values imposed.
pub fn initial_profile(config: &WallConfig, params: &SimulationParams) -> Result<(MagnetizationProfile, Constraints)> {
    params.validate()?;
    let grid = grid_for(config, params)?;
    let (cons, plateaus) = constraints_for(config, &grid, params)?;
    let w = params.delta().max(2.0 * grid.h);
    let a = config.positions();
    let mut phi: Vec<f64> = (0..grid.n)
        .map(|i| {
            let x = grid.x(i);
            let mut v = plateaus[0];
            for (k, ak) in a.iter().enumerate() {
                let jump = plateaus[k + 1] - plateaus[k];
                v += jump * (0.5 + ((x - ak) / w).atan() / PI);
            }
            v
        })
        .collect();
    cons.impose(&mut phi);
    Ok((MagnetizationProfile::new(grid, phi)?, cons))
}

/// Why the descent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescentStatus {
    Converged,
    /// No decrease along the search direction at working precision.
    Stalled,
    MaxIter,
}

/// One line of the energy trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub exchange: f64,
    pub anisotropy: f64,
    pub stray: f64,
    pub total: f64,
}

impl TraceRow {
    fn new(iteration: usize, e: &EnergyBreakdown) -> Self {
        Self { iteration, exchange: e.exchange, anisotropy: e.anisotropy, stray: e.stray, total: e.total }
    }
}

/// Outcome of [`minimize_energy`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMinimum {
    pub profile: MagnetizationProfile,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
    /// `max |∂E/∂φᵢ| / h` over free nodes.
    pub gradient_norm: f64,
    pub status: DescentStatus,
    pub trace: Vec<TraceRow>,
    /// Largest `|m₁ - cos α|` on the outer tenth of the window (unconfined truncation indicator).
    pub boundary_residual: f64,
}

struct Functional {
    model: Model,
    cos_alpha: f64,
    epsilon: f64,
    h: f64,
    op: StrayOperator,
}

impl Functional {
    /// Energy, gradient, `f = m₁ - cos α` and `T f`.
    fn evaluate_full(&self, phi: &[f64]) -> (EnergyBreakdown, Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = phi.len();
        let h = self.h;
        let f: Vec<f64> = phi.iter().map(|p| p.cos() - self.cos_alpha).collect();
        let (s, tf) = self.op.seminorm_sq(&f);
        let mut exchange = 0.0;
        for w in phi.windows(2) {
            exchange += (w[1] - w[0]).powi(2);
        }
        exchange *= 0.5 * self.epsilon / h;
        let aniso = self.model == Model::Unconfined;
        let anisotropy = if aniso { 0.5 * h * f.iter().map(|v| v * v).sum::<f64>() } else { 0.0 };
        let c = self.epsilon / h;
        let grad = (0..n)
            .map(|i| {
                let lap = 2.0 * phi[i] - if i > 0 { phi[i - 1] } else { phi[i] } - if i + 1 < n { phi[i + 1] } else { phi[i] };
                let sin = phi[i].sin();
                let mut g = c * lap - tf[i] * sin;
                if aniso {
                    g -= h * f[i] * sin;
                }
                g
            })
            .collect();
        let stray = 0.5 * s;
        (EnergyBreakdown { exchange, anisotropy, stray, total: exchange + anisotropy + stray }, grad, f, tf)
    }

    /// `E(φ₁) - E(φ₀)` from differences, free of the cancellation in `E(φ₁) - E(φ₀)`.
    fn difference(&self, phi0: &[f64], f0: &[f64], tf0: &[f64], phi1: &[f64], f1: &[f64], tf1: &[f64]) -> f64 {
        let mut ex = 0.0;
        for i in 0..phi0.len() - 1 {
            let d0 = phi0[i + 1] - phi0[i];
            let d1 = phi1[i + 1] - phi1[i];
            let dd = (phi1[i + 1] - phi0[i + 1]) - (phi1[i] - phi0[i]);
            ex += dd * (d0 + d1);
        }
        ex *= 0.5 * self.epsilon / self.h;
        let mut st = 0.0;
        let mut an = 0.0;
        for i in 0..phi0.len() {
            // cos φ₁ - cos φ₀ = -2 sin((φ₁+φ₀)/2) sin((φ₁-φ₀)/2)
            let df = -2.0 * (0.5 * (phi1[i] + phi0[i])).sin() * (0.5 * (phi1[i] - phi0[i])).sin();
            st += df * (tf0[i] + tf1[i]);
            an += df * (f0[i] + f1[i]);
        }
        st *= 0.5;
        if self.model == Model::Unconfined {
            ex += 0.5 * self.h * an;
        }
        ex + st
    }
}

/// Inverse of the circulant approximation of the Hessian at `sin φ = ±1`.
struct Preconditioner {
    n: usize,
    inv_symbol: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Preconditioner {
    fn new(func: &Functional, n: usize) -> Self {
        let len = func.op.symbol().len();
        let mut planner = FftPlanner::new();
        let h = func.h;
        let shift = if func.model == Model::Unconfined { h } else { 1e-2 * h };
        let inv_symbol = func
            .op
            .symbol()
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let th = 2.0 * PI * k as f64 / len as f64;
                let p = func.epsilon / h * (2.0 - 2.0 * th.cos()) + t * len as f64 + shift;
                1.0 / (p * len as f64)
            })
            .collect();
        Self { n, inv_symbol, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    fn apply(&self, g: &[f64], mask: &[bool]) -> Vec<f64> {
        let len = self.inv_symbol.len();
        let mut buf: Vec<Complex64> =
            (0..len).map(|i| Complex64::new(if i < self.n && mask[i] { g[i] } else { 0.0 }, 0.0)).collect();
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.inv_symbol) {
            *b *= *s;
        }
        self.inverse.process(&mut buf);
        (0..self.n).map(|i| if mask[i] { buf[i].re } else { 0.0 }).collect()
    }
}

const MEMORY: usize = 12;

/// Two-loop recursion with the preconditioner as initial inverse Hessian.
fn lbfgs_direction<P: Fn(&[f64]) -> Vec<f64>>(
    grad: &[f64],
    history: &std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    precondition: P,
) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    let mut r = precondition(&q);
    if let Some((s, y, _)) = history.back() {
        let py = precondition(y);
        let scale = dot(s, y) / dot(y, &py);
        if scale.is_finite() && scale > 0.0 {
            r.iter_mut().for_each(|v| *v *= scale);
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &r);
        for (ri, si) in r.iter_mut().zip(s) {
            *ri += (a - b) * si;
        }
    }
    r.iter().map(|v| -v).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned limited-memory BFGS descent with Armijo backtracking over `M(a, d)`.
pub fn minimize_energy(
    config: &WallConfig,
    params: &SimulationParams,
    init: Option<&MagnetizationProfile>,
) -> Result<EnergyMinimum> {
    params.validate()?;
    let (default_init, cons) = initial_profile(config, params)?;
    let mut phi = match init {
        Some(p) => {
            if p.grid != default_init.grid {
                return Err(NeelError::InvalidConfig("initial profile grid does not match the parameters".into()));
            }
            p.phi.clone()
        }
        None => default_init.phi.clone(),
    };
    cons.impose(&mut phi);
    let grid = default_init.grid;
    let n = grid.n;
    let h = grid.h;
    let mask = cons.mask(n);
    let func = Functional {
        model: config.model(),
        cos_alpha: config.alpha().cos(),
        epsilon: params.epsilon,
        h,
        op: StrayOperator::new(n, params.pad_factor)?,
    };
    let pre = Preconditioner::new(&func, n);
    let masked = |mut g: Vec<f64>| {
        for (v, free) in g.iter_mut().zip(&mask) {
            if !free {
                *v = 0.0;
            }
        }
        g
    };
    let (mut energy, g0, mut f, mut tf) = func.evaluate_full(&phi);
    let mut grad = masked(g0);
    let mut trace = vec![TraceRow::new(0, &energy)];
    let mut status = DescentStatus::MaxIter;
    let mut iterations = 0;
    let mut history: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = std::collections::VecDeque::new();
    let gnorm = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(v.abs())) / h;
    for it in 0..params.max_iter {
        iterations = it;
        if gnorm(&grad) <= params.tol {
            status = DescentStatus::Converged;
            break;
        }
        let mut dir = lbfgs_direction(&grad, &history, |v| pre.apply(v, &mask));
        let mut slope = dot(&grad, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = pre.apply(&grad, &mask).iter().map(|v| -v).collect();
            slope = dot(&grad, &dir);
            if !(slope < 0.0) {
                status = DescentStatus::Stalled;
                break;
            }
        }
        let mut a = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = phi.iter().zip(&dir).map(|(p, d)| p + a * d).collect();
            let (e, g, f1, tf1) = func.evaluate_full(&trial);
            let change = func.difference(&phi, &f, &tf, &trial, &f1, &tf1);
            if change <= 1e-4 * a * slope {
                accepted = Some((trial, e, masked(g), f1, tf1));
                break;
            }
            a *= 0.5;
        }
        let Some((trial, e, g, f1, tf1)) = accepted else {
            status = DescentStatus::Stalled;
            break;
        };
        let s: Vec<f64> = trial.iter().zip(&phi).map(|(x, y)| x - y).collect();
        let y: Vec<f64> = g.iter().zip(&grad).map(|(x, y)| x - y).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            history.push_back((s, y, 1.0 / sy));
            if history.len() > MEMORY {
                history.pop_front();
            }
        }
        phi = trial;
        energy = e;
        grad = g;
        f = f1;
        tf = tf1;
        iterations = it + 1;
        if params.trace_every > 0 && iterations % params.trace_every == 0 {
            trace.push(TraceRow::new(iterations, &energy));
        }
    }
    if trace.last().map(|r| r.iteration) != Some(iterations) {
        trace.push(TraceRow::new(iterations, &energy));
    }
    let c = config.alpha().cos();
    let edge = (n / 10).max(1);
    let boundary_residual = phi[..edge]
        .iter()
        .chain(&phi[n - edge..])
        .fold(0.0f64, |m, p| m.max((p.cos() - c).abs()));
    Ok(EnergyMinimum {
        profile: MagnetizationProfile::new(grid, phi)?,
        energy,
        iterations,
        gradient_norm: gnorm(&grad),
        status,
        trace,
        boundary_residual,
    })
}

/// `E(ε) ≈ A/log(1/δ) + B/(log δ)²` over a range of `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square misfit.
    pub residual: f64,
    /// `π Γ / 2`.
    pub leading_reference: f64,
    /// `W(a, d)`.
    pub w: f64,
    /// `B - W`, an estimate of `Σ e(dₙ)`.
    pub core_estimate: f64,
    pub points: Vec<FitPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub epsilon: f64,
    pub delta: f64,
    pub energy: EnergyBreakdown,
    pub status: DescentStatus,
    pub gradient_norm: f64,
}

/// Minimised energies at each `ε`, run concurrently.
pub fn sample_energies(config: &WallConfig, epsilons: &[f64], params: &SimulationParams) -> Result<Vec<FitPoint>> {
    let run = |eps: &f64| -> Result<FitPoint> {
        let p = SimulationParams { epsilon: *eps, ..*params };
        let m = minimize_energy(config, &p, None)?;
        Ok(FitPoint { epsilon: *eps, delta: p.delta(), energy: m.energy, status: m.status, gradient_norm: m.gradient_norm })
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Result<FitPoint>> = {
        use rayon::prelude::*;
        epsilons.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<FitPoint>> = epsilons.iter().map(run).collect();
    results.into_iter().collect()
}

fn check_range(epsilons: &[f64]) -> Result<()> {
    if epsilons.len() < 4 {
        return Err(NeelError::InvalidConfig("the fit needs at least four values of ε".into()));
    }
    let lo = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || hi / lo < 100.0 - 1e-9 {
        return Err(NeelError::InvalidConfig("ε values must span at least two decades".into()));
    }
    Ok(())
}

fn least_squares(design: DMatrix<f64>, rhs: DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let m = rhs.len();
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    if sv.min() <= 1e-10 * sv.max() {
        return Err(NeelError::Accuracy { message: "ill-conditioned expansion fit".into(), estimate: sv.min(), error: sv.max() });
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| NeelError::Domain(e.to_string()))?;
    let resid = &design * &coef - rhs;
    Ok((coef, (resid.norm_squared() / m as f64).sqrt()))
}

fn log_inv(delta: f64) -> f64 {
    (1.0 / delta).ln()
}

/// Two-term fit of already computed energies.
pub fn fit_expansion(config: &WallConfig, points: &[FitPoint]) -> Result<ExpansionFit> {
    let eps: Vec<f64> = points.iter().map(|p| p.epsilon).collect();
    check_range(&eps)?;
    let m = points.len();
    let design = DMatrix::from_fn(m, 2, |i, j| log_inv(points[i].delta).powi(-(j as i32) - 1));
    let rhs = DVector::from_iterator(m, points.iter().map(|p| p.energy.total));
    let (coef, residual) = least_squares(design, rhs)?;
    let w = renorm::renormalised_energy(config)?.value;
    let gamma = config.gammas().gamma;
    let leading_reference = PI * gamma.iter().map(|g| g * g).sum::<f64>() / 2.0;
    Ok(ExpansionFit {
        a: coef[0],
        b: coef[1],
        residual,
        leading_reference,
        w,
        core_estimate: coef[1] - w,
        points: points.to_vec(),
    })
}

/// Minimises at each `ε` and fits the two-term expansion.
pub fn expansion_fit(config: &WallConfig, epsilons: &[f64], params: &SimulationParams) -> Result<ExpansionFit> {
    check_range(epsilons)?;
    let points = sample_energies(config, epsilons, params)?;
    fit_expansion(config, &points)
}

/// Joint fit of two configurations with equal `Γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedFit {
    /// Shared leading coefficient.
    pub a: f64,
    pub b: [f64; 2],
    /// Per-configuration `1/log³(1/δ)` coefficients.
    pub c: [f64; 2],
    pub delta_b: f64,
    pub delta_w: f64,
    pub residual: f64,
}

/// `E_k ≈ A/L + B_k/L² + C_k/L³` with a common `A`, `L = log(1/δ)`.
///
/// `B₁ - B₂` estimates `W₁ - W₂` since the core energies cancel.
pub fn paired_fit(first: (&WallConfig, &[FitPoint]), second: (&WallConfig, &[FitPoint])) -> Result<PairedFit> {
    let g1: f64 = first.0.gammas().gamma.iter().map(|g| g * g).sum();
    let g2: f64 = second.0.gammas().gamma.iter().map(|g| g * g).sum();
    if (g1 - g2).abs() > 1e-12 * g1.abs().max(1.0) {
        return Err(NeelError::InvalidConfig("paired fit needs configurations with the same Γ".into()));
    }
    for pts in [first.1, second.1] {
        check_range(&pts.iter().map(|p| p.epsilon).collect::<Vec<_>>())?;
    }
    let (n1, n2) = (first.1.len(), second.1.len());
    let mut design = DMatrix::zeros(n1 + n2, 5);
    let mut rhs = DVector::zeros(n1 + n2);
    for (row, (k, p)) in first.1.iter().map(|p| (0, p)).chain(second.1.iter().map(|p| (1, p))).enumerate() {
        let l = log_inv(p.delta);
        design[(row, 0)] = 1.0 / l;
        design[(row, 1 + k)] = 1.0 / (l * l);
        design[(row, 3 + k)] = 1.0 / (l * l * l);
        rhs[row] = p.energy.total;
    }
    let (coef, residual) = least_squares(design, rhs)?;
    let w1 = renorm::renormalised_energy(first.0)?.value;
    let w2 = renorm::renormalised_energy(second.0)?.value;
    Ok(PairedFit {
        a: coef[0],
        b: [coef[1], coef[2]],
        c: [coef[3], coef[4]],
        delta_b: coef[1] - coef[2],
        delta_w: w1 - w2,
        residual,
    })
}
