//! Wall configurations and the geometric helpers of the confined model.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};

/// Confined film `(-1, 1)` or unconfined film `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Confined,
    Unconfined,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Confined => "confined",
            Model::Unconfined => "unconfined",
        })
    }
}

impl FromStr for Model {
    type Err = NeelError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "confined" => Ok(Model::Confined),
            "unconfined" => Ok(Model::Unconfined),
            other => Err(NeelError::Parse(format!("unknown model '{other}'"))),
        }
    }
}

/// Wall sign `d ∈ {+1, -1}`: `cos φ = d` at the wall centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Alternating sequence of length `n` starting with `first`.
    pub fn alternating(n: usize, first: Sign) -> Vec<Sign> {
        let mut s = first;
        (0..n)
            .map(|_| {
                let out = s;
                s = s.flip();
                out
            })
            .collect()
    }
}

impl TryFrom<i32> for Sign {
    type Error = NeelError;
    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(NeelError::Parse(format!("wall sign must be +1 or -1, got {v}"))),
        }
    }
}

impl From<Sign> for i32 {
    fn from(s: Sign) -> i32 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl FromStr for Sign {
    type Err = NeelError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(NeelError::Parse(format!("wall sign must be +1 or -1, got '{other}'"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Ordered wall centres with signs and the anisotropy angle `α ∈ (0, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWallConfig", into = "RawWallConfig")]
pub struct WallConfig {
    model: Model,
    alpha: f64,
    positions: Vec<f64>,
    signs: Vec<Sign>,
}

#[derive(Serialize, Deserialize)]
struct RawWallConfig {
    model: Model,
    alpha: f64,
    positions: Vec<f64>,
    signs: Vec<Sign>,
}

impl TryFrom<RawWallConfig> for WallConfig {
    type Error = NeelError;
    fn try_from(r: RawWallConfig) -> Result<Self> {
        WallConfig::new(r.model, r.alpha, r.positions, r.signs)
    }
}

impl From<WallConfig> for RawWallConfig {
    fn from(c: WallConfig) -> Self {
        RawWallConfig { model: c.model, alpha: c.alpha, positions: c.positions, signs: c.signs }
    }
}

impl WallConfig {
    pub fn new(model: Model, alpha: f64, positions: Vec<f64>, signs: Vec<Sign>) -> Result<Self> {
        check_alpha(alpha)?;
        if positions.len() != signs.len() {
            return Err(NeelError::InvalidConfig(format!(
                "{} positions but {} signs",
                positions.len(),
                signs.len()
            )));
        }
        if positions.iter().any(|a| !a.is_finite()) {
            return Err(NeelError::InvalidConfig("non-finite wall position".into()));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NeelError::InvalidConfig("wall positions must be strictly increasing".into()));
        }
        if model == Model::Confined && positions.iter().any(|a| a.abs() >= 1.0) {
            return Err(NeelError::InvalidConfig("confined wall positions must lie in (-1, 1)".into()));
        }
        Ok(Self { model, alpha, positions, signs })
    }

    /// Same signs and angle, new positions.
    pub fn with_positions(&self, positions: Vec<f64>) -> Result<Self> {
        Self::new(self.model, self.alpha, positions, self.signs.clone())
    }

    pub fn model(&self) -> Model {
        self.model
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }
    pub fn len(&self) -> usize {
        self.positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `γ_n = d_n - cos α`.
    pub fn gammas(&self) -> Gammas {
        gammas(&self.signs, self.alpha)
    }

    /// Minimal separation `ρ(a)`.
    pub fn rho(&self) -> f64 {
        rho(self.model, &self.positions)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(NeelError::Domain(format!("alpha must lie in (0, pi), got {alpha}")));
    }
    Ok(())
}

/// Wall strengths and `Γ = Σ γ_n²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gammas {
    pub gamma: Vec<f64>,
    pub total: f64,
}

pub fn gammas(signs: &[Sign], alpha: f64) -> Gammas {
    let c = alpha.cos();
    let gamma: Vec<f64> = signs.iter().map(|d| d.value() - c).collect();
    let total = gamma.iter().map(|g| g * g).sum();
    Gammas { gamma, total }
}

/// Pseudo-distance `|b - c| / (1 - bc)` on `(-1, 1)`.
pub fn varrho(b: f64, c: f64) -> Result<f64> {
    if b.abs() >= 1.0 || c.abs() >= 1.0 {
        return Err(NeelError::Domain(format!("pseudo-distance needs |b|, |c| < 1, got {b}, {c}")));
    }
    Ok((b - c).abs() / (1.0 - b * c))
}

/// `Φ_b(z) = (z + b) / (1 + b z)`; `Φ_{-b}` is its inverse.
pub fn mobius(b: f64, z: Complex64) -> Result<Complex64> {
    if b.abs() >= 1.0 {
        return Err(NeelError::Domain(format!("Möbius parameter needs |b| < 1, got {b}")));
    }
    Ok((z + b) / (1.0 + b * z))
}

/// Half the minimal gap between walls (and, when confined, the boundary).
/// `+∞` when nothing constrains it.
pub fn rho(model: Model, positions: &[f64]) -> f64 {
    let mut m = f64::INFINITY;
    for w in positions.windows(2) {
        m = m.min(w[1] - w[0]);
    }
    if model == Model::Confined {
        if let (Some(first), Some(last)) = (positions.first(), positions.last()) {
            m = m.min(2.0 * first + 2.0).min(2.0 - 2.0 * last);
        }
    }
    0.5 * m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        assert!(WallConfig::new(Model::Confined, 1.0, vec![0.5, 0.2], vec![Sign::Plus; 2]).is_err());
        assert!(WallConfig::new(Model::Confined, 1.0, vec![1.0], vec![Sign::Plus]).is_err());
        assert!(WallConfig::new(Model::Unconfined, 0.0, vec![0.0], vec![Sign::Plus]).is_err());
        assert!(WallConfig::new(Model::Unconfined, 1.0, vec![0.0], vec![]).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(Model::Unconfined, &[0.3]), f64::INFINITY);
        assert!((rho(Model::Confined, &[0.3]) - 0.7).abs() < 1e-15);
        assert!((rho(Model::Unconfined, &[0.0, 0.5, 2.0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let c = WallConfig::new(Model::Confined, 1.0, vec![-0.2, 0.4], vec![Sign::Plus, Sign::Minus]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<WallConfig>(&s).unwrap(), c);
        assert!(serde_json::from_str::<WallConfig>(
            r#"{"model":"confined","alpha":1.0,"positions":[0.4,-0.2],"signs":[1,-1]}"#
        )
        .is_err());
    }
}
