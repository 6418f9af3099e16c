use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{Model, WallConfig};
use crate::quad;
use crate::specfun::{self, exp_e1, QuadratureSpec};

/// Value and gradient of a potential at `(x1, x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x1: f64,
    pub x2: f64,
    pub value: f64,
    pub gradient: Option<[f64; 2]>,
}

impl FieldSample {
    pub fn grad(&self) -> [f64; 2] {
        self.gradient.unwrap_or([f64::NAN; 2])
    }
}

fn check_half_plane(x1: f64, x2: f64) -> Result<()> {
    if !(x2 >= 0.0) || !x1.is_finite() || !x2.is_finite() {
        return Err(NeelError::Domain(format!("point ({x1}, {x2}) is not in the closed upper half-plane")));
    }
    if x1 == 0.0 && x2 == 0.0 {
        return Err(NeelError::Domain("potential is singular at the wall centre".into()));
    }
    Ok(())
}

/// `F(w) = e^w E_1(w)` at `w = x2 - i x1`, and `F'(w) = F - 1/w`.
fn unconfined_pair(x1: f64, x2: f64) -> (Complex64, Complex64) {
    let w = Complex64::new(x2, -x1);
    let f = exp_e1(w);
    (f, f - w.inv())
}

/// Unconfined `v`: harmonic in the half-plane, `∂v/∂x2 = v - πδ_0` on the boundary.
pub fn v_unconfined(x1: f64, x2: f64) -> Result<FieldSample> {
    check_half_plane(x1, x2)?;
    let (f, fp) = unconfined_pair(x1, x2);
    Ok(FieldSample { x1, x2, value: f.re, gradient: Some([fp.im, fp.re]) })
}

/// Unconfined `u`, the harmonic conjugate with `∇v = ∇^⊥u`.
pub fn u_unconfined(x1: f64, x2: f64) -> Result<FieldSample> {
    check_half_plane(x1, x2)?;
    let (f, fp) = unconfined_pair(x1, x2);
    Ok(FieldSample { x1, x2, value: -f.im, gradient: Some([fp.re, -fp.im]) })
}

/// Reference quadrature of `v = ∫_0^∞ e^{-t|x1|} (sin t x2 + t cos t x2)/(1+t²) dt`, `x1 ≠ 0`.
pub fn v_unconfined_quadrature(x1: f64, x2: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = x1.abs();
    if k == 0.0 || x2 < 0.0 {
        return Err(NeelError::Domain("integral representation needs x1 ≠ 0 and x2 ≥ 0".into()));
    }
    representation(k, spec, |t| (-t * k).exp() * ((t * x2).sin() + t * (t * x2).cos()) / (1.0 + t * t))
}

/// Reference quadrature of `u = -sgn(x1) ∫_0^∞ e^{-t|x1|} (cos t x2 - t sin t x2)/(1+t²) dt`.
pub fn u_unconfined_quadrature(x1: f64, x2: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = x1.abs();
    if k == 0.0 || x2 < 0.0 {
        return Err(NeelError::Domain("integral representation needs x1 ≠ 0 and x2 ≥ 0".into()));
    }
    let v = representation(k, spec, |t| (-t * k).exp() * ((t * x2).cos() - t * (t * x2).sin()) / (1.0 + t * t))?;
    Ok(-x1.signum() * v)
}

fn representation<F: Fn(f64) -> f64>(k: f64, spec: &QuadratureSpec, f: F) -> Result<f64> {
    let end = 45.0 / k;
    let mut breaks = vec![0.0];
    let mut b = 1.0;
    while b < end {
        breaks.push(b);
        b = (b * 2.0).min(end);
    }
    breaks.push(end);
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let r = quad::adaptive(&f, w[0], w[1], spec.abs_tol * 0.1, spec.rel_tol * 0.1, spec.max_depth);
        if !r.converged {
            return Err(NeelError::Accuracy { message: "integral representation".into(), estimate: r.value, error: r.error });
        }
        acc += r.value;
    }
    Ok(acc)
}

/// `F(w) = -1/cosh w`, mapping the strip `{Re w > 0, 0 < Im w < π}` onto the half-plane.
pub fn strip_map(w: Complex64) -> Complex64 {
    -w.cosh().inv()
}

/// `F^{-1}(z) = arcosh(-1/z)` with values in the strip.
pub fn strip_inverse(z: Complex64) -> Result<Complex64> {
    if z.im < 0.0 || z.norm() == 0.0 || (z.im == 0.0 && (z.re.abs() == 1.0)) {
        return Err(NeelError::Domain(format!("strip inverse undefined at {z}")));
    }
    let w = (-z.inv()).acosh();
    // Im(-1/z) ≥ 0, so only signed zeros and roundoff need folding back
    let w = Complex64::new(w.re.abs(), w.im.abs());
    if !(w.im >= -1e-15 && w.im <= std::f64::consts::PI + 1e-15) || !w.re.is_finite() {
        return Err(NeelError::Domain(format!("strip inverse left the strip at {z}")));
    }
    Ok(w)
}

/// `g = F^{-1}` and `g'` at `z`.
fn confined_pair(x1: f64, x2: f64) -> Result<(Complex64, Complex64)> {
    let z = Complex64::new(x1, x2);
    let w = strip_inverse(z)?;
    // F'(w) = sinh w / cosh² w
    let c = w.cosh();
    let fp = w.sinh() / (c * c);
    Ok((w, fp.inv()))
}

/// Confined `u = π/2 - Im F^{-1}`: `π/2` on `(-1, 0)`, `-π/2` on `(0, 1)`, Neumann outside.
pub fn u_confined(x1: f64, x2: f64) -> Result<FieldSample> {
    check_half_plane(x1, x2)?;
    let (w, gp) = confined_pair(x1, x2)?;
    Ok(FieldSample { x1, x2, value: FRAC_PI_2 - w.im, gradient: Some([-gp.im, -gp.re]) })
}

/// Confined conjugate `v = Re F^{-1}` with `∇v = ∇^⊥u`.
pub fn v_confined(x1: f64, x2: f64) -> Result<FieldSample> {
    check_half_plane(x1, x2)?;
    let (w, gp) = confined_pair(x1, x2)?;
    Ok(FieldSample { x1, x2, value: w.re, gradient: Some([gp.re, -gp.im]) })
}

/// Which potential of a wall to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    U,
    V,
}

/// Single-wall potential centred at `b`: a shift (unconfined) or `· ∘ Φ_{-b}` (confined).
pub fn wall_potential(model: Model, which: Potential, b: f64, x1: f64, x2: f64) -> Result<FieldSample> {
    match model {
        Model::Unconfined => {
            let s = match which {
                Potential::U => u_unconfined(x1 - b, x2)?,
                Potential::V => v_unconfined(x1 - b, x2)?,
            };
            Ok(FieldSample { x1, x2, ..s })
        }
        Model::Confined => {
            if b.abs() >= 1.0 {
                return Err(NeelError::Domain(format!("confined wall centre must lie in (-1, 1), got {b}")));
            }
            let z = Complex64::new(x1, x2);
            let den = Complex64::new(1.0, 0.0) - b * z;
            let zeta = (z - b) / den;
            let dzeta = (1.0 - b * b) / (den * den);
            let zeta_im = zeta.im.max(0.0);
            let s = match which {
                Potential::U => u_confined(zeta.re, zeta_im)?,
                Potential::V => v_confined(zeta.re, zeta_im)?,
            };
            // gradient of Re/Im parts of a holomorphic function transforms with the complex derivative
            let [g1, g2] = s.grad();
            let inner = Complex64::new(g1, -g2) * dzeta;
            Ok(FieldSample { x1, x2, value: s.value, gradient: Some([inner.re, -inner.im]) })
        }
    }
}

/// `Σ λ_n` and `Σ ω_n` style data attached to one wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearWallData {
    pub index: usize,
    /// `Σ_{k≠n} γ_k I(|a_k - a_n|)` (unconfined).
    pub lambda: f64,
    /// `Σ_{k≠n} γ_k u_{a_k}(a_n, 0)`.
    pub omega: f64,
}

/// Superposed potentials `u* = Σ γ_n u_{a_n}`, `v* = Σ γ_n v_{a_n}` and the trace `μ*`.
#[derive(Debug, Clone)]
pub struct StarField {
    model: Model,
    positions: Vec<f64>,
    gamma: Vec<f64>,
}

impl StarField {
    pub fn new(config: &WallConfig) -> Self {
        Self { model: config.model(), positions: config.positions().to_vec(), gamma: config.gammas().gamma }
    }

    fn superpose(&self, which: Potential, x1: f64, x2: f64) -> Result<FieldSample> {
        let mut value = 0.0;
        let mut grad = [0.0; 2];
        for (b, g) in self.positions.iter().zip(&self.gamma) {
            let s = wall_potential(self.model, which, *b, x1, x2)?;
            value += g * s.value;
            let [a, c] = s.grad();
            grad[0] += g * a;
            grad[1] += g * c;
        }
        Ok(FieldSample { x1, x2, value, gradient: Some(grad) })
    }

    pub fn u_star(&self, x1: f64, x2: f64) -> Result<FieldSample> {
        self.superpose(Potential::U, x1, x2)
    }

    pub fn v_star(&self, x1: f64, x2: f64) -> Result<FieldSample> {
        self.superpose(Potential::V, x1, x2)
    }

    /// `μ*(x1) = Σ γ_n I(|x1 - a_n|)` (unconfined trace of `v*`).
    pub fn mu_star(&self, x1: f64, spec: &QuadratureSpec) -> Result<f64> {
        if self.model != Model::Unconfined {
            return Err(NeelError::InvalidConfig("μ* is defined for the unconfined model".into()));
        }
        let mut acc = 0.0;
        for (b, g) in self.positions.iter().zip(&self.gamma) {
            acc += g * specfun::eval_i((x1 - b).abs(), spec)?.value;
        }
        Ok(acc)
    }

    pub fn near_wall_data(&self, spec: &QuadratureSpec) -> Result<Vec<NearWallData>> {
        let n = self.positions.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut lambda = 0.0;
            let mut omega = 0.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let t = (self.positions[k] - self.positions[i]).abs();
                if self.model == Model::Unconfined {
                    lambda += self.gamma[k] * specfun::eval_i(t, spec)?.value;
                }
                omega += self.gamma[k]
                    * wall_potential(self.model, Potential::U, self.positions[k], self.positions[i], 0.0)?.value;
            }
            out.push(NearWallData { index: i, lambda, omega });
        }
        Ok(out)
    }
}
