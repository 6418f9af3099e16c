//! Renormalised energies `W(a, d)` of wall configurations.

mod admissible;
mod minimize;
mod path;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{Model, WallConfig};
use crate::specfun::{self, QuadratureSpec, EULER_GAMMA};

pub use admissible::{
    admissible_range, all_subblock_sums_negative, alternating_sign_sum, positive_subblock, sign_sum, theta_n,
    AdmissibleCase, AdmissibleRange,
};
pub use minimize::{
    critical_point_n3, minimize_w, multi_start_minimize, random_start, CriticalPoint, MinimizeOptions,
    MinimizeReport, MinimizeStatus,
};
pub use path::{scan_path, CollapsePath, ScanPoint};

/// `W` together with its per-wall and per-pair contributions.
///
/// `pair_terms[k][n]` holds the `(k, n)` entry of the double sum, so
/// `value = Σ self_terms + Σ_{k≠n} pair_terms[k][n]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenormResult {
    pub value: f64,
    pub self_terms: Vec<f64>,
    pub pair_terms: Vec<Vec<f64>>,
    pub gradient: Vec<f64>,
}

impl RenormResult {
    /// Max-norm of the gradient.
    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

/// `arcsech ϱ(b, c)` in a cancellation-free form.
pub fn confined_kernel(b: f64, c: f64) -> f64 {
    let root = ((1.0 - b * b) * (1.0 - c * c)).sqrt();
    ((1.0 - b * c + root) / (b - c).abs()).ln()
}

fn coincidence(config: &WallConfig) -> Option<NeelError> {
    let g = config.gammas().gamma;
    let a = config.positions();
    for k in 0..a.len() {
        for n in k + 1..a.len() {
            if a[k] == a[n] || (config.model() == Model::Unconfined && (a[n] - a[k]).abs() == 0.0) {
                let limit = if g[k] * g[n] > 0.0 { f64::NEG_INFINITY } else { f64::INFINITY };
                return Some(NeelError::Coincident { first: k, second: n, limit });
            }
        }
    }
    None
}

/// `W` of the confined model.
pub fn w_confined(config: &WallConfig) -> Result<RenormResult> {
    if config.model() != Model::Confined {
        return Err(NeelError::InvalidConfig("w_confined needs a confined configuration".into()));
    }
    if let Some(e) = coincidence(config) {
        return Err(e);
    }
    let a = config.positions();
    let g = config.gammas().gamma;
    let n = a.len();
    let self_terms: Vec<f64> = (0..n).map(|i| -FRAC_PI_2 * g[i] * g[i] * (2.0 - 2.0 * a[i] * a[i]).ln()).collect();
    let mut pair_terms = vec![vec![0.0; n]; n];
    let mut gradient: Vec<f64> = (0..n).map(|i| PI * g[i] * g[i] * a[i] / (1.0 - a[i] * a[i])).collect();
    for k in 0..n {
        for m in k + 1..n {
            let p = -FRAC_PI_2 * g[k] * g[m] * confined_kernel(a[k], a[m]);
            pair_terms[k][m] = p;
            pair_terms[m][k] = p;
            // derivative of -π γ_k γ_m arcsech ϱ(b, c) in b
            let dk = |b: f64, c: f64| PI * g[k] * g[m] * ((1.0 - c * c) / (1.0 - b * b)).sqrt() / (b - c);
            gradient[m] += dk(a[m], a[k]);
            gradient[k] += dk(a[k], a[m]);
        }
    }
    let value = self_terms.iter().sum::<f64>() + pair_terms.iter().flatten().sum::<f64>();
    if !value.is_finite() {
        return Err(NeelError::Domain("confined W overflowed".into()));
    }
    Ok(RenormResult { value, self_terms, pair_terms, gradient })
}

/// `W` of the unconfined model.
pub fn w_unconfined(config: &WallConfig, spec: &QuadratureSpec) -> Result<RenormResult> {
    if config.model() != Model::Unconfined {
        return Err(NeelError::InvalidConfig("w_unconfined needs an unconfined configuration".into()));
    }
    if let Some(e) = coincidence(config) {
        return Err(e);
    }
    let a = config.positions();
    let g = config.gammas().gamma;
    let n = a.len();
    let i0 = -EULER_GAMMA;
    let self_terms: Vec<f64> = (0..n).map(|i| -FRAC_PI_2 * i0 * g[i] * g[i]).collect();
    let mut pair_terms = vec![vec![0.0; n]; n];
    let mut gradient = vec![0.0; n];
    for k in 0..n {
        for m in k + 1..n {
            let t = a[m] - a[k];
            let kern = specfun::eval_i(t, spec)?.value;
            let dk = specfun::eval_i_prime(t, spec)?.value;
            let p = -FRAC_PI_2 * g[k] * g[m] * kern;
            pair_terms[k][m] = p;
            pair_terms[m][k] = p;
            // ∂/∂a_m of -π γ_k γ_m I(a_m - a_k)
            let d = -PI * g[k] * g[m] * dk;
            gradient[m] += d;
            gradient[k] -= d;
        }
    }
    let value = self_terms.iter().sum::<f64>() + pair_terms.iter().flatten().sum::<f64>();
    Ok(RenormResult { value, self_terms, pair_terms, gradient })
}

/// Dispatch on the configuration's model.
pub fn renormalised_energy(config: &WallConfig) -> Result<RenormResult> {
    match config.model() {
        Model::Confined => w_confined(config),
        Model::Unconfined => w_unconfined(config, &QuadratureSpec::default()),
    }
}

/// Analytic gradient of `W`.
pub fn grad_w(config: &WallConfig) -> Result<Vec<f64>> {
    renormalised_energy(config)
        .map(|r| r.gradient)
        .map_err(|e| match e {
            NeelError::Coincident { first, second, .. } => {
                NeelError::Domain(format!("gradient undefined: walls {first} and {second} coincide"))
            }
            other => other,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Sign;

    #[test]
    fn single_confined_wall() {
        let c = WallConfig::new(Model::Confined, FRAC_PI_2, vec![0.0], vec![Sign::Plus]).unwrap();
        let r = w_confined(&c).unwrap();
        assert!((r.value + FRAC_PI_2 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn empty_confined_is_zero() {
        let c = WallConfig::new(Model::Confined, 1.0, vec![], vec![]).unwrap();
        assert_eq!(w_confined(&c).unwrap().value, 0.0);
    }

    #[test]
    fn kernel_matches_definition() {
        let (b, c): (f64, f64) = (0.3, -0.45);
        let rho = (b - c).abs() / (1.0 - b * c);
        let direct = ((1.0 + (1.0 - rho * rho).sqrt()) / rho).ln();
        assert!((confined_kernel(b, c) - direct).abs() < 1e-14);
    }
}
