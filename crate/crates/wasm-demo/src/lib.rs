//! Browser bindings: the kernel curve, the two-wall energy landscape and a
//! single-wall micromagnetic relaxation.

use neel_core::geometry::{Model, Sign, WallConfig};
use neel_core::micromag::{leading_order, minimize_energy, SimulationParams};
use neel_core::renorm::renormalised_energy;
use neel_core::specfun::{eval_i, eval_i0, QuadratureSpec};
use wasm_bindgen::prelude::*;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

fn sign(d: i32) -> Result<Sign, String> {
    Sign::try_from(d).map_err(|e| e.to_string())
}

/// `[t₀, I(t₀), t₁, I(t₁), ...]` on log-spaced `t`.
pub fn kernel_samples(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(t_min > 0.0 && t_max > t_min) || points < 2 {
        return Err("need 0 < t_min < t_max and at least two points".into());
    }
    let spec = QuadratureSpec::default();
    let (a, b) = (t_min.ln(), t_max.ln());
    let mut out = Vec::with_capacity(2 * points);
    for k in 0..points {
        let t = (a + (b - a) * k as f64 / (points - 1) as f64).exp();
        out.push(t);
        out.push(eval_i(t, &spec).map_err(|e| e.to_string())?.value);
    }
    Ok(out)
}

/// `W` of two walls on an `n × n` grid of `(a₁, a₂)` over `[lo, hi]²`, row-major
/// in `a₂`; `NaN` where `a₁ ≥ a₂`.
pub fn landscape(model: &str, alpha: f64, d1: i32, d2: i32, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, String> {
    let model: Model = model.parse().map_err(|e: neel_core::NeelError| e.to_string())?;
    if !(hi > lo) || n < 2 {
        return Err("need lo < hi and n ≥ 2".into());
    }
    let d = vec![sign(d1)?, sign(d2)?];
    let probe = WallConfig::new(model, alpha, vec![lo.max(-0.99), hi.min(0.99)], d.clone()).map_err(|e| e.to_string())?;
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (a1, a2) = (lo + step * i as f64, lo + step * j as f64);
            let w = probe.with_positions(vec![a1, a2]).ok().and_then(|c| renormalised_energy(&c).ok());
            out.push(w.map_or(f64::NAN, |r| r.value));
        }
    }
    Ok(out)
}

/// Relaxed single confined wall.
#[wasm_bindgen]
pub struct Relaxed {
    x: Vec<f64>,
    m1: Vec<f64>,
    m2: Vec<f64>,
    energy: f64,
    prediction: f64,
    iterations: usize,
}

#[wasm_bindgen]
impl Relaxed {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn m1(&self) -> Vec<f64> {
        self.m1.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn m2(&self) -> Vec<f64> {
        self.m2.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn energy(&self) -> f64 {
        self.energy
    }
    /// `π Γ / (2 log(1/δ))`.
    #[wasm_bindgen(getter)]
    pub fn prediction(&self) -> f64 {
        self.prediction
    }
    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

pub fn relax(alpha: f64, epsilon: f64, position: f64, d: i32, nodes: usize) -> Result<Relaxed, String> {
    let c = WallConfig::new(Model::Confined, alpha, vec![position], vec![sign(d)?]).map_err(|e| e.to_string())?;
    let params = SimulationParams { epsilon, nodes, max_iter: 5000, ..SimulationParams::default() };
    let m = minimize_energy(&c, &params, None).map_err(|e| e.to_string())?;
    Ok(Relaxed {
        x: m.profile.grid.nodes(),
        m1: m.profile.m1(),
        m2: m.profile.m2(),
        energy: m.energy.total,
        prediction: leading_order(c.gammas().total, params.delta()),
        iterations: m.iterations,
    })
}

#[wasm_bindgen(js_name = kernelCurve)]
pub fn kernel_curve(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    kernel_samples(t_min, t_max, points).map_err(js)
}

#[wasm_bindgen(js_name = kernelConstant)]
pub fn kernel_constant() -> f64 {
    eval_i0(&QuadratureSpec::default()).map_or(f64::NAN, |v| v.value)
}

#[wasm_bindgen(js_name = wLandscape)]
pub fn w_landscape(model: &str, alpha: f64, d1: i32, d2: i32, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    landscape(model, alpha, d1, d2, lo, hi, n).map_err(js)
}

#[wasm_bindgen(js_name = relaxWall)]
pub fn relax_wall(alpha: f64, epsilon: f64, position: f64, d: i32, nodes: usize) -> Result<Relaxed, JsError> {
    relax(alpha, epsilon, position, d, nodes).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_curve_is_decreasing() {
        let v = kernel_samples(0.01, 10.0, 20).unwrap();
        assert_eq!(v.len(), 40);
        assert!(v.chunks(2).collect::<Vec<_>>().windows(2).all(|p| p[1][1] < p[0][1]));
        assert!((kernel_constant() + 0.577_215_664_9).abs() < 1e-8);
    }

    #[test]
    fn landscape_masks_unordered_pairs() {
        let v = landscape("confined", 1.2, 1, -1, -0.9, 0.9, 7).unwrap();
        assert_eq!(v.len(), 49);
        assert!(v[0].is_nan() && v[6].is_nan());
        assert!(v[6 * 7].is_finite());
        assert!(landscape("sideways", 1.2, 1, -1, -0.9, 0.9, 7).is_err());
        assert!(landscape("confined", 1.2, 2, -1, -0.9, 0.9, 7).is_err());
    }

    #[test]
    fn relaxation_runs() {
        let r = relax(std::f64::consts::FRAC_PI_2, 0.05, 0.1, 1, 256).unwrap();
        assert_eq!(r.x.len(), 256);
        assert!(r.energy > 0.0 && r.energy.is_finite());
        assert!(r.m1.iter().zip(&r.m2).all(|(a, b)| (a * a + b * b - 1.0).abs() < 1e-12));
    }
}
