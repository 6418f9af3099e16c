use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};

/// Endpoint magnitude above which boundary data counts as not decayed.
pub const TRUNCATION_THRESHOLD: f64 = 1e-3;

/// Matrix entries of the seminorm for band-limited interpolation of samples.
fn toeplitz_entry(m: usize) -> f64 {
    if m == 0 {
        PI / 2.0
    } else if m % 2 == 0 {
        0.0
    } else {
        -2.0 / (PI * (m * m) as f64)
    }
}

/// `‖f‖²_{Ḣ^{1/2}} = fᵀ T f` for grid samples, applied through a circulant embedding.
///
/// `T` has symbol `|ξ|` on the Nyquist band, so the value does not depend on the
/// spacing. Its product with a vector is exact (no periodic wrap-around) as long
/// as the embedding length is at least `2n`.
#[derive(Clone)]
pub struct StrayOperator {
    n: usize,
    len: usize,
    symbol: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for StrayOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StrayOperator").field("n", &self.n).field("len", &self.len).finish()
    }
}

impl StrayOperator {
    pub fn new(n: usize, pad_factor: usize) -> Result<Self> {
        if n == 0 {
            return Err(NeelError::Domain("stray operator needs at least one sample".into()));
        }
        let len = (n * pad_factor.max(2)).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut col: Vec<Complex64> = (0..len)
            .map(|k| {
                let m = k.min(len - k);
                let v = if m < n { toeplitz_entry(m) } else { 0.0 };
                Complex64::new(v, 0.0)
            })
            .collect();
        forward.process(&mut col);
        let symbol = col.iter().map(|c| c.re / len as f64).collect();
        Ok(Self { n, len, symbol, forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `T f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        assert_eq!(f.len(), self.n, "sample count does not match the operator");
        let mut buf: Vec<Complex64> = (0..self.len)
            .map(|i| Complex64::new(if i < self.n { f[i] } else { 0.0 }, 0.0))
            .collect();
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.symbol) {
            *b *= *s;
        }
        self.inverse.process(&mut buf);
        buf[..self.n].iter().map(|c| c.re).collect()
    }

    /// `fᵀ T f` together with `T f`.
    pub fn seminorm_sq(&self, f: &[f64]) -> (f64, Vec<f64>) {
        let tf = self.apply(f);
        let s = f.iter().zip(&tf).map(|(a, b)| a * b).sum();
        (s, tf)
    }

    /// Symbol on the embedding frequencies `2πk/len`, `k < len`.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }
}

/// Result of a stray-field evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrayEnergy {
    /// `½ ‖f‖²`.
    pub energy: f64,
    pub seminorm_sq: f64,
    /// The data had not decayed at the grid ends.
    pub truncated: bool,
}

fn truncated(f: &[f64]) -> bool {
    match (f.first(), f.last()) {
        (Some(a), Some(b)) => a.abs().max(b.abs()) > TRUNCATION_THRESHOLD,
        _ => false,
    }
}

/// `½‖f‖²_{Ḣ^{1/2}}` from the Fourier weight `|ξ|`, zero-padded by `pad_factor`.
pub fn stray_energy_spectral(f: &[f64], pad_factor: usize) -> Result<StrayEnergy> {
    if pad_factor < 2 {
        return Err(NeelError::Domain(format!("pad factor must be at least 2, got {pad_factor}")));
    }
    if f.is_empty() {
        return Ok(StrayEnergy { energy: 0.0, seminorm_sq: 0.0, truncated: false });
    }
    let op = StrayOperator::new(f.len(), pad_factor)?;
    let (s, _) = op.seminorm_sq(f);
    Ok(StrayEnergy { energy: 0.5 * s, seminorm_sq: s, truncated: truncated(f) })
}

/// `½‖f‖²` from `(1/2π) ∬ (f(s) - f(t))²/(s - t)²` by a midpoint double sum.
///
/// Samples are cell averages on a uniform grid, `f = 0` outside; the diagonal
/// cells use the difference quotient. `O(n²)`.
pub fn stray_energy_double_integral(f: &[f64]) -> StrayEnergy {
    let n = f.len();
    let row = |i: usize| -> f64 {
        let mut acc = 0.0;
        for j in 0..n {
            if j != i {
                let d = (i as f64) - (j as f64);
                acc += (f[i] - f[j]).powi(2) / (d * d);
            }
        }
        let lo = if i > 0 { f[i - 1] } else { 0.0 };
        let hi = if i + 1 < n { f[i + 1] } else { 0.0 };
        acc += 0.25 * (hi - lo).powi(2);
        // t outside the grid, both orderings
        let ii = i as f64;
        acc += 2.0 * f[i] * f[i] * (1.0 / (ii + 0.5) + 1.0 / (n as f64 - ii - 0.5));
        acc
    };
    #[cfg(feature = "parallel")]
    let total: f64 = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect::<Vec<_>>().iter().sum()
    };
    #[cfg(not(feature = "parallel"))]
    let total: f64 = (0..n).map(row).sum();
    let s = total / (2.0 * PI);
    StrayEnergy { energy: 0.5 * s, seminorm_sq: s, truncated: truncated(f) }
}

/// Harmonic extension `v` of grid data and its conjugate `u` on levels `x2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneField {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    /// `v[level][node]`.
    pub v: Vec<Vec<f64>>,
    /// `u[level][node]`, with `∂₂v = ∂₁u` and `∂₁v = -∂₂u`.
    pub u: Vec<Vec<f64>>,
}

/// Extends `f` harmonically by the multiplier `e^{-|ξ| x2}`; `u` uses `i sgn ξ`.
pub fn stray_potential_solve(x1: &[f64], f: &[f64], x2: &[f64], pad_factor: usize) -> Result<HalfPlaneField> {
    let n = f.len();
    if n < 2 || x1.len() != n {
        return Err(NeelError::Domain("need matching node and sample arrays of length ≥ 2".into()));
    }
    if x2.iter().any(|y| !(*y >= 0.0)) {
        return Err(NeelError::Domain("levels must be nonnegative".into()));
    }
    let h = x1[1] - x1[0];
    let len = (n * pad_factor.max(2)).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut spec: Vec<Complex64> = (0..len).map(|i| Complex64::new(if i < n { f[i] } else { 0.0 }, 0.0)).collect();
    fwd.process(&mut spec);
    let xi: Vec<f64> = (0..len)
        .map(|k| {
            let k = if k <= len / 2 { k as f64 } else { k as f64 - len as f64 };
            2.0 * PI * k / (len as f64 * h)
        })
        .collect();
    let mut v = Vec::with_capacity(x2.len());
    let mut u = Vec::with_capacity(x2.len());
    for &y in x2 {
        let mut bv: Vec<Complex64> = spec.iter().zip(&xi).map(|(s, k)| s * (-k.abs() * y).exp() / len as f64).collect();
        let mut bu: Vec<Complex64> = bv
            .iter()
            .zip(&xi)
            .map(|(s, k)| s * Complex64::new(0.0, k.signum()))
            .collect();
        inv.process(&mut bv);
        inv.process(&mut bu);
        v.push(bv[..n].iter().map(|c| c.re).collect());
        u.push(bu[..n].iter().map(|c| c.re).collect());
    }
    Ok(HalfPlaneField { x1: x1.to_vec(), x2: x2.to_vec(), v, u })
}

impl HalfPlaneField {
    /// `∫|∇v|²` by centred differences in `x1` and one-sided differences between levels.
    pub fn dirichlet_energy(&self) -> f64 {
        let h = self.x1[1] - self.x1[0];
        let n = self.x1.len();
        let density: Vec<f64> = self
            .v
            .iter()
            .map(|row| {
                (0..n - 1).map(|i| h * ((row[i + 1] - row[i]) / h).powi(2)).sum::<f64>()
            })
            .collect();
        let mut acc = 0.0;
        for l in 0..self.x2.len() - 1 {
            let dy = self.x2[l + 1] - self.x2[l];
            let vert: f64 = (0..n).map(|i| h * ((self.v[l + 1][i] - self.v[l][i]) / dy).powi(2)).sum();
            acc += dy * (0.5 * (density[l] + density[l + 1]) + vert);
        }
        acc
    }
}
