use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{Model, WallConfig};

use super::renormalised_energy;

/// One-parameter families `a^(η)` with `a^(1) = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CollapsePath {
    /// `a ↦ c + η (a - c)` about the centroid (unconfined) or the origin (confined).
    Uniform,
    /// `a_k ↦ η a_k` for `first ≤ k ≤ last`; needs `a_first < 0 < a_last`.
    SubBlock { first: usize, last: usize },
    /// Walls `index` and `index + 1` approach their midpoint.
    Pair { index: usize },
}

impl CollapsePath {
    pub fn apply(&self, config: &WallConfig, eta: f64) -> Result<WallConfig> {
        let a = config.positions();
        let mut out = a.to_vec();
        match *self {
            CollapsePath::Uniform => {
                let c = match config.model() {
                    Model::Confined => 0.0,
                    Model::Unconfined => a.iter().sum::<f64>() / a.len().max(1) as f64,
                };
                for x in &mut out {
                    *x = c + eta * (*x - c);
                }
            }
            CollapsePath::SubBlock { first, last } => {
                if first > last || last >= a.len() {
                    return Err(NeelError::Domain("sub-block indices out of range".into()));
                }
                if !(a[first] < 0.0 && a[last] > 0.0) {
                    return Err(NeelError::Domain("sub-block collapse needs a_first < 0 < a_last".into()));
                }
                for x in &mut out[first..=last] {
                    *x *= eta;
                }
            }
            CollapsePath::Pair { index } => {
                if index + 1 >= a.len() {
                    return Err(NeelError::Domain("pair index out of range".into()));
                }
                let m = 0.5 * (a[index] + a[index + 1]);
                let h = 0.5 * (a[index + 1] - a[index]);
                out[index] = m - eta * h;
                out[index + 1] = m + eta * h;
            }
        }
        config.with_positions(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub eta: f64,
    pub w: f64,
}

/// Tabulate `W(a^(η))` along a path.
pub fn scan_path(config: &WallConfig, path: CollapsePath, etas: &[f64]) -> Result<Vec<ScanPoint>> {
    let eval = |&eta: &f64| -> Result<ScanPoint> {
        let c = path.apply(config, eta)?;
        Ok(ScanPoint { eta, w: renormalised_energy(&c)?.value })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        etas.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        etas.iter().map(eval).collect()
    }
}
