use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{gammas, Model, Sign, WallConfig};
use crate::specfun::{self, QuadratureSpec};

use super::renormalised_energy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimizeStatus {
    Converged,
    DivergingToMinusInfinity,
    BoundaryCollapse,
    NoCriticalPoint,
    MaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Max-norm of `∇_a W` at which a point counts as stationary.
    pub tol: f64,
    pub max_iter: usize,
    /// `W` below this is reported as divergence to `-∞`.
    pub w_floor: f64,
    /// Unconfined gaps above this are reported as escape to infinity.
    pub gap_ceiling: f64,
    /// Gaps below this are reported as collapse.
    pub collapse_gap: f64,
    /// Certification restarts (saddle escapes and outward probes).
    pub max_restarts: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 5000, w_floor: -1e6, gap_ceiling: 1e6, collapse_gap: 1e-12, max_restarts: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeReport {
    pub argmin: Vec<f64>,
    pub w: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub status: MinimizeStatus,
    /// Smallest Hessian eigenvalue at the returned point (translation mode removed).
    pub min_hessian_eigenvalue: Option<f64>,
}

struct Problem<'a> {
    base: &'a WallConfig,
}

impl Problem<'_> {
    fn model(&self) -> Model {
        self.base.model()
    }

    fn eval_a(&self, a: &[f64]) -> Option<(f64, Vec<f64>)> {
        let c = self.base.with_positions(a.to_vec()).ok()?;
        let r = renormalised_energy(&c).ok()?;
        if !r.value.is_finite() || r.gradient.iter().any(|g| !g.is_finite()) {
            return None;
        }
        Some((r.value, r.gradient))
    }

    fn y_to_a(&self, y: &[f64]) -> Vec<f64> {
        let mut z = Vec::with_capacity(y.len());
        let mut acc = 0.0;
        for (i, v) in y.iter().enumerate() {
            acc = if i == 0 { *v } else { acc + v.exp() };
            z.push(acc);
        }
        match self.model() {
            Model::Unconfined => z,
            Model::Confined => z.into_iter().map(f64::tanh).collect(),
        }
    }

    fn a_to_y(&self, a: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = match self.model() {
            Model::Unconfined => a.to_vec(),
            Model::Confined => a.iter().map(|x| x.atanh()).collect(),
        };
        (0..z.len()).map(|i| if i == 0 { z[0] } else { (z[i] - z[i - 1]).ln() }).collect()
    }

    /// `(W, ∇_y W, a, ∇_a W)`.
    fn eval_y(&self, y: &[f64]) -> Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> {
        if y.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let a = self.y_to_a(y);
        let (w, ga) = self.eval_a(&a)?;
        let gz: Vec<f64> = match self.model() {
            Model::Unconfined => ga.clone(),
            Model::Confined => ga.iter().zip(&a).map(|(g, x)| g * (1.0 - x * x)).collect(),
        };
        let n = y.len();
        let mut gy = vec![0.0; n];
        let mut tail = 0.0;
        for m in (0..n).rev() {
            tail += gz[m];
            gy[m] = if m == 0 { tail } else { y[m].exp() * tail };
        }
        Some((w, gy, a, ga))
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

enum Descent {
    Stationary { y: Vec<f64>, iterations: usize },
    Stopped { status: MinimizeStatus, y: Vec<f64>, iterations: usize },
}

fn bfgs(p: &Problem, y0: Vec<f64>, opts: &MinimizeOptions) -> Result<Descent> {
    let n = y0.len();
    let Some((mut w, mut g, mut a, mut ga)) = p.eval_y(&y0) else {
        return Err(NeelError::InvalidConfig("initial configuration cannot be evaluated".into()));
    };
    let mut y = y0;
    let mut h = DMatrix::<f64>::identity(n, n);
    let log_collapse = opts.collapse_gap.ln();
    for it in 0..opts.max_iter {
        if max_norm(&ga) <= opts.tol {
            return Ok(Descent::Stationary { y, iterations: it });
        }
        if let Some(status) = escape_status(p, &y, &a, w, opts, log_collapse) {
            return Ok(Descent::Stopped { status, y, iterations: it });
        }
        let gv = DVector::from_column_slice(&g);
        let mut dir = -(&h * &gv);
        let mut slope = dir.dot(&gv);
        if slope >= 0.0 {
            h = DMatrix::identity(n, n);
            dir = -gv.clone();
            slope = dir.dot(&gv);
        }
        let cap = 2.0 / max_norm(dir.as_slice()).max(1e-300);
        let mut step = cap.min(1.0);
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = y.iter().zip(dir.iter()).map(|(yi, di)| yi + step * di).collect();
            if let Some((wt, gt, at, gat)) = p.eval_y(&trial) {
                if wt <= w + 1e-4 * step * slope + 1e-14 * (1.0 + w.abs()) {
                    accepted = Some((trial, wt, gt, at, gat));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((yn, wn, gn, an, gan)) = accepted else {
            // no admissible decrease: either stationary within roundoff or stuck
            if max_norm(&ga) <= 1e2 * opts.tol {
                return Ok(Descent::Stationary { y, iterations: it });
            }
            return Ok(Descent::Stopped { status: MinimizeStatus::MaxIter, y, iterations: it });
        };
        let s = DVector::from_iterator(n, yn.iter().zip(&y).map(|(a, b)| a - b));
        let dg = DVector::from_iterator(n, gn.iter().zip(&g).map(|(a, b)| a - b));
        let sy = s.dot(&dg);
        if sy > 1e-12 * s.norm() * dg.norm() {
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(n, n);
            let left = &i - rho * &s * dg.transpose();
            let right = &i - rho * &dg * s.transpose();
            h = &left * &h * &right + rho * &s * s.transpose();
        }
        y = yn;
        w = wn;
        g = gn;
        a = an;
        ga = gan;
    }
    Ok(Descent::Stopped { status: MinimizeStatus::MaxIter, y, iterations: opts.max_iter })
}

fn escape_status(
    p: &Problem,
    y: &[f64],
    a: &[f64],
    w: f64,
    opts: &MinimizeOptions,
    log_collapse: f64,
) -> Option<MinimizeStatus> {
    if w < opts.w_floor || y.iter().skip(1).any(|v| *v < log_collapse) {
        return Some(MinimizeStatus::DivergingToMinusInfinity);
    }
    match p.model() {
        Model::Confined => {
            if a.iter().any(|x| 1.0 - x.abs() < opts.collapse_gap) {
                return Some(MinimizeStatus::BoundaryCollapse);
            }
        }
        Model::Unconfined => {
            if a.windows(2).any(|w| w[1] - w[0] > opts.gap_ceiling) {
                return Some(MinimizeStatus::NoCriticalPoint);
            }
        }
    }
    None
}

/// Finite-difference Hessian of `W` in wall coordinates with the translation
/// mode of the unconfined model removed.
fn hessian_eigen(p: &Problem, a: &[f64]) -> Option<SymmetricEigen<f64, nalgebra::Dyn>> {
    let n = a.len();
    let scale = crate::geometry::rho(p.model(), a).min(1.0);
    let h = 1e-4 * scale;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut ap = a.to_vec();
        let mut am = a.to_vec();
        ap[j] += h;
        am[j] -= h;
        let (_, gp) = p.eval_a(&ap)?;
        let (_, gm) = p.eval_a(&am)?;
        for i in 0..n {
            m[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let mut sym = 0.5 * (&m + m.transpose());
    if p.model() == Model::Unconfined && n > 0 {
        let big = sym.iter().fold(1.0f64, |acc, x| acc.max(x.abs())) * n as f64;
        sym += DMatrix::from_element(n, n, big / n as f64);
    }
    Some(SymmetricEigen::new(sym))
}

/// Minimise `W` over ordered configurations, starting from `config`.
pub fn minimize_w(config: &WallConfig, opts: &MinimizeOptions) -> Result<MinimizeReport> {
    let p = Problem { base: config };
    if config.is_empty() {
        let r = renormalised_energy(config)?;
        return Ok(MinimizeReport {
            argmin: vec![],
            w: r.value,
            gradient_norm: 0.0,
            iterations: 0,
            restarts: 0,
            status: MinimizeStatus::Converged,
            min_hessian_eigenvalue: None,
        });
    }
    let mut y = p.a_to_y(config.positions());
    let mut total_iter = 0;
    for restart in 0..=opts.max_restarts {
        let report = |y: &[f64], status, iters, eig| -> Result<MinimizeReport> {
            let a = p.y_to_a(y);
            let (w, ga) = p
                .eval_a(&a)
                .ok_or_else(|| NeelError::Domain("energy not finite at the final iterate".into()))?;
            Ok(MinimizeReport {
                argmin: a,
                w,
                gradient_norm: max_norm(&ga),
                iterations: iters,
                restarts: restart,
                status,
                min_hessian_eigenvalue: eig,
            })
        };
        match bfgs(&p, y.clone(), opts)? {
            Descent::Stopped { status, y: yf, iterations } => {
                total_iter += iterations;
                return report(&yf, status, total_iter, None);
            }
            Descent::Stationary { y: yf, iterations } => {
                total_iter += iterations;
                let a = p.y_to_a(&yf);
                let (w, _) = p.eval_a(&a).ok_or_else(|| NeelError::Domain("energy not finite".into()))?;
                let eig = hessian_eigen(&p, &a);
                let (lmin, vmin, lmax) = match &eig {
                    Some(e) => {
                        let (imin, lmin) = e
                            .eigenvalues
                            .iter()
                            .enumerate()
                            .fold((0, f64::INFINITY), |b, (i, v)| if *v < b.1 { (i, *v) } else { b });
                        let lmax = e.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                        (lmin, e.eigenvectors.column(imin).iter().copied().collect::<Vec<_>>(), lmax)
                    }
                    None => (f64::NAN, vec![], f64::NAN),
                };
                if lmin < -1e-7 * lmax.max(1e-300) {
                    // saddle: step along the unstable direction
                    let rho = crate::geometry::rho(p.model(), &a).min(1.0);
                    let mut best: Option<(Vec<f64>, f64)> = None;
                    let mut s = 0.2 * rho;
                    while s > 1e-8 * rho && best.is_none() {
                        for sign in [1.0, -1.0] {
                            let trial: Vec<f64> = a.iter().zip(&vmin).map(|(x, v)| x + sign * s * v).collect();
                            if let Some((wt, _)) = p.eval_a(&trial) {
                                if wt < w && best.as_ref().is_none_or(|b| wt < b.1) {
                                    best = Some((trial, wt));
                                }
                            }
                        }
                        s *= 0.5;
                    }
                    match best {
                        Some((trial, _)) => {
                            y = p.a_to_y(&trial);
                            continue;
                        }
                        None => return report(&yf, MinimizeStatus::Converged, total_iter, Some(lmin)),
                    }
                }
                if p.model() == Model::Unconfined && a.len() >= 2 {
                    let centre = a.iter().sum::<f64>() / a.len() as f64;
                    let mut best: Option<(Vec<f64>, f64)> = None;
                    for f in [1.5, 2.0, 4.0] {
                        let trial: Vec<f64> = a.iter().map(|x| centre + f * (x - centre)).collect();
                        if let Some((wt, _)) = p.eval_a(&trial) {
                            if wt < w - 1e-14 * (1.0 + w.abs()) && best.as_ref().is_none_or(|b| wt < b.1) {
                                best = Some((trial, wt));
                            }
                        }
                    }
                    if let Some((trial, _)) = best {
                        if trial.windows(2).any(|v| v[1] - v[0] > opts.gap_ceiling) {
                            return report(&p.a_to_y(&trial), MinimizeStatus::NoCriticalPoint, total_iter, None);
                        }
                        y = p.a_to_y(&trial);
                        continue;
                    }
                }
                return report(&yf, MinimizeStatus::Converged, total_iter, Some(lmin));
            }
        }
    }
    let a = p.y_to_a(&y);
    let (w, ga) = p.eval_a(&a).ok_or_else(|| NeelError::Domain("energy not finite".into()))?;
    Ok(MinimizeReport {
        argmin: a,
        w,
        gradient_norm: max_norm(&ga),
        iterations: total_iter,
        restarts: opts.max_restarts,
        status: MinimizeStatus::MaxIter,
        min_hessian_eigenvalue: None,
    })
}

/// A random ordered starting configuration.
pub fn random_start<R: Rng>(model: Model, n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = match model {
            Model::Confined => (0..n).map(|_| rng.gen_range(-0.9..0.9)).collect(),
            Model::Unconfined => (0..n).map(|_| rng.gen_range(0.0..2.0 * n as f64)).collect(),
        };
        a.sort_by(|x, y| x.total_cmp(y));
        if a.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return a;
        }
    }
}

/// Independent runs from `starts` seeded random configurations.
pub fn multi_start_minimize(
    config: &WallConfig,
    starts: usize,
    seed: u64,
    opts: &MinimizeOptions,
) -> Result<Vec<MinimizeReport>> {
    let run = |i: usize| -> Result<MinimizeReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let a = random_start(config.model(), config.len(), &mut rng);
        minimize_w(&config.with_positions(a)?, opts)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..starts).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..starts).map(run).collect()
    }
}

/// Equidistant stationary point of three alternating unconfined walls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub t0: f64,
    pub positions: Vec<f64>,
    pub w: f64,
    pub gradient_norm: f64,
}

/// The critical point `(0, t₀, 2t₀)` if `d₁ cos α ∈ (-7/9, -1/3)`.
pub fn critical_point_n3(alpha: f64, d: &[Sign], spec: &QuadratureSpec) -> Result<Option<CriticalPoint>> {
    if d.len() != 3 || d[0] == d[1] || d[1] == d[2] {
        return Err(NeelError::Domain("critical point needs three alternating walls".into()));
    }
    let x = d[0].value() * alpha.cos();
    if !(x > -7.0 / 9.0 && x < -1.0 / 3.0) {
        return Ok(None);
    }
    let g = gammas(d, alpha).gamma;
    let c = -g[1] / g[0];
    let t0 = specfun::ratio_root(c, spec)?;
    let config = WallConfig::new(Model::Unconfined, alpha, vec![0.0, t0, 2.0 * t0], d.to_vec())?;
    let r = super::w_unconfined(&config, spec)?;
    Ok(Some(CriticalPoint { t0, positions: config.positions().to_vec(), w: r.value, gradient_norm: r.gradient_norm() }))
}
