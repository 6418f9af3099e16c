//! Discretised one-dimensional micromagnetic energy `E_ε` on a uniform grid.
//!
//! The stray term is `½‖m₁ - cos α‖²_{Ḣ^{1/2}}`, evaluated spectrally
//! ([`stray_energy_spectral`]) with a brute-force double-integral oracle
//! ([`stray_energy_double_integral`]). Walls are imposed by pinning `φ` to a
//! multiple of `π` at the node nearest to each `aₙ`.

mod minimize;
mod profile;
mod stray;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::Model;

pub use minimize::{
    expansion_fit, fit_expansion, initial_profile, minimize_energy, paired_fit, plateau_values, sample_energies,
    Constraints, DescentStatus, EnergyMinimum, ExpansionFit, FitPoint, PairedFit, TraceRow,
};
pub use profile::{read_profile_csv, write_profile_csv, write_trace_csv};
pub use stray::{
    stray_energy_double_integral, stray_energy_spectral, stray_potential_solve, HalfPlaneField, StrayEnergy,
    StrayOperator, TRUNCATION_THRESHOLD,
};

/// Uniform grid on `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub left: f64,
    pub right: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid1D {
    pub fn new(left: f64, right: f64, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(NeelError::InvalidConfig(format!("grid needs at least 16 nodes, got {n}")));
        }
        if !(left.is_finite() && right.is_finite() && right > left) {
            return Err(NeelError::InvalidConfig(format!("bad grid interval [{left}, {right}]")));
        }
        Ok(Self { left, right, n, h: (right - left) / (n - 1) as f64 })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.left + self.h * i as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        (((x - self.left) / self.h).round().max(0.0) as usize).min(self.n - 1)
    }
}

/// Lifting `φ` on a grid; `m = (cos φ, sin φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagnetizationProfile {
    pub grid: Grid1D,
    pub phi: Vec<f64>,
}

impl MagnetizationProfile {
    pub fn new(grid: Grid1D, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.n {
            return Err(NeelError::InvalidConfig(format!("{} values for {} nodes", phi.len(), grid.n)));
        }
        if phi.iter().any(|p| !p.is_finite()) {
            return Err(NeelError::InvalidConfig("profile has non-finite values".into()));
        }
        Ok(Self { grid, phi })
    }

    pub fn m1(&self) -> Vec<f64> {
        self.phi.iter().map(|p| p.cos()).collect()
    }

    pub fn m2(&self) -> Vec<f64> {
        self.phi.iter().map(|p| p.sin()).collect()
    }

    /// `x ↦ -x` with `φ ↦ -φ`, which maps `(a, d)` to `(-a reversed, d reversed)`.
    pub fn reflected(&self) -> Self {
        let g = Grid1D { left: -self.grid.right, right: -self.grid.left, ..self.grid };
        Self { grid: g, phi: self.phi.iter().rev().map(|p| -p).collect() }
    }
}

/// Parameters of one discretised minimisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationParams {
    pub epsilon: f64,
    pub nodes: usize,
    pub pad_factor: usize,
    /// Half-width of the unconfined window; `None` means `max(10, 10·span)`.
    pub half_width: Option<f64>,
    /// Minimal separation of pinned nodes, in cells.
    pub pin_separation: usize,
    /// Stop when `max |∂E/∂φᵢ| / h` falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Record an energy trace row every this many iterations (0 disables).
    pub trace_every: usize,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            nodes: 1 << 14,
            pad_factor: 4,
            half_width: None,
            pin_separation: 4,
            tol: 1e-6,
            max_iter: 20_000,
            trace_every: 0,
        }
    }
}

impl SimulationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(NeelError::InvalidConfig(format!("ε must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.nodes < 16 {
            return Err(NeelError::InvalidConfig("at least 16 nodes are needed".into()));
        }
        if self.pad_factor < 2 {
            return Err(NeelError::InvalidConfig("pad factor must be at least 2".into()));
        }
        if let Some(l) = self.half_width {
            if !(l > 0.0) {
                return Err(NeelError::InvalidConfig("half-width must be positive".into()));
            }
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(NeelError::InvalidConfig("tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// `δ = ε log(1/ε)`.
    pub fn delta(&self) -> f64 {
        self.epsilon * (1.0 / self.epsilon).ln()
    }
}

/// Components of `E_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub exchange: f64,
    pub anisotropy: f64,
    pub stray: f64,
    pub total: f64,
}

/// `(ε/2) Σ h ((φᵢ₊₁ - φᵢ)/h)²`.
pub fn exchange_energy(profile: &MagnetizationProfile, epsilon: f64) -> f64 {
    let h = profile.grid.h;
    0.5 * epsilon * profile.phi.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h
}

/// `½ Σ h (m₁ᵢ - cos α)²`; only the unconfined model carries this term.
pub fn anisotropy_energy(profile: &MagnetizationProfile, model: Model, alpha: f64) -> Result<f64> {
    if model != Model::Unconfined {
        return Err(NeelError::Domain("the confined energy has no anisotropy term".into()));
    }
    let c = alpha.cos();
    Ok(0.5 * profile.grid.h * profile.phi.iter().map(|p| (p.cos() - c).powi(2)).sum::<f64>())
}

/// `m₁ - cos α` at the nodes.
pub fn stray_data(profile: &MagnetizationProfile, alpha: f64) -> Vec<f64> {
    let c = alpha.cos();
    profile.phi.iter().map(|p| p.cos() - c).collect()
}

/// Assembles `E_ε`.
pub fn total_energy(profile: &MagnetizationProfile, model: Model, alpha: f64, params: &SimulationParams) -> Result<EnergyBreakdown> {
    let exchange = exchange_energy(profile, params.epsilon);
    let anisotropy = match model {
        Model::Unconfined => anisotropy_energy(profile, model, alpha)?,
        Model::Confined => 0.0,
    };
    let stray = stray_energy_spectral(&stray_data(profile, alpha), params.pad_factor)?.energy;
    Ok(EnergyBreakdown { exchange, anisotropy, stray, total: exchange + anisotropy + stray })
}

/// Leading-order prediction `π Γ / (2 log(1/δ))`.
pub fn leading_order(gamma_sq_sum: f64, delta: f64) -> f64 {
    PI * gamma_sq_sum / (2.0 * (1.0 / delta).ln())
}
