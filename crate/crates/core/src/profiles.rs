//! Piecewise-constant limit phases and their decomposition into elementary
//! transitions.
//!
//! A step function takes values in `2πZ ± α`; every jump splits uniquely into
//! a monotone run of atoms of size `±2α` and `±(2π - 2α)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{check_alpha, gammas, Sign};

const TOL: f64 = 1e-9;

/// A raw jump of size `size` at location `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub b: f64,
    pub size: f64,
}

/// `φ = base + Σ size_n 1_{x > b_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    alpha: f64,
    base: f64,
    jumps: Vec<Jump>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    alpha: f64,
    base: f64,
    jumps: Vec<Jump>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = NeelError;
    fn try_from(r: RawStep) -> Result<Self> {
        StepFunction::new(r.alpha, r.base, r.jumps)
    }
}

impl From<StepFunction> for RawStep {
    fn from(s: StepFunction) -> Self {
        RawStep { alpha: s.alpha, base: s.base, jumps: s.jumps }
    }
}

/// One elementary transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub b: f64,
    pub sigma: f64,
}

/// Plateau type: `+1` for values in `2πZ + α`, `-1` for `2πZ - α`.
fn plateau_type(v: f64, alpha: f64) -> Option<i8> {
    let near = |x: f64| {
        let r = (x / (2.0 * PI)).round();
        (x - 2.0 * PI * r).abs() < TOL
    };
    // at α = π/2 both types can coincide only if α ≡ -α, which needs α = π
    if near(v - alpha) {
        Some(1)
    } else if near(v + alpha) {
        Some(-1)
    } else {
        None
    }
}

impl StepFunction {
    pub fn new(alpha: f64, base: f64, jumps: Vec<Jump>) -> Result<Self> {
        check_alpha(alpha)?;
        if plateau_type(base, alpha).is_none() {
            return Err(NeelError::Domain(format!("base value {base} is not in 2πZ ± α")));
        }
        if jumps.iter().any(|j| j.size == 0.0 || !j.size.is_finite() || !j.b.is_finite()) {
            return Err(NeelError::Domain("jumps must be finite and nonzero".into()));
        }
        if jumps.windows(2).any(|w| w[0].b > w[1].b) {
            return Err(NeelError::Domain("jump locations must be nondecreasing".into()));
        }
        let s = Self { alpha, base, jumps };
        s.decompose()?;
        Ok(s)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn base(&self) -> f64 {
        self.base
    }
    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Raw jumps with coincident locations merged.
    fn merged(&self) -> Vec<Jump> {
        let mut out: Vec<Jump> = Vec::new();
        for j in &self.jumps {
            match out.last_mut() {
                Some(last) if last.b == j.b => last.size += j.size,
                _ => out.push(*j),
            }
        }
        out.retain(|j| j.size.abs() > TOL);
        out
    }

    /// Atoms `(b_ℓ, σ_ℓ)`, ordered by location and then by the monotone run.
    pub fn decompose(&self) -> Result<Vec<Atom>> {
        let a = self.alpha;
        let mut v = self.base;
        let mut kind = plateau_type(v, a).ok_or_else(|| NeelError::Domain("base off lattice".into()))?;
        let mut atoms = Vec::new();
        for j in self.merged() {
            let mut rest = j.size;
            let dir = j.size.signum();
            while rest.abs() > TOL {
                // rising from 2πk - α goes through 2πk, from 2πk + α through 2πk + π
                let mag = if (dir > 0.0) == (kind < 0) { 2.0 * a } else { 2.0 * PI - 2.0 * a };
                if mag > rest.abs() + TOL {
                    return Err(NeelError::Domain(format!(
                        "jump {} at {} does not split into transitions from plateau {v}",
                        j.size, j.b
                    )));
                }
                let sigma = dir * mag;
                atoms.push(Atom { b: j.b, sigma });
                v += sigma;
                rest -= sigma;
                kind = -kind;
            }
        }
        Ok(atoms)
    }

    /// Number of elementary transitions `ι`.
    pub fn iota(&self) -> usize {
        self.decompose().map(|a| a.len()).unwrap_or(0)
    }

    /// `η = (π/2) Σ (1 - cos(σ/2))²`.
    pub fn eta(&self) -> f64 {
        self.decompose()
            .map(|atoms| atoms.iter().map(|t| (1.0 - (t.sigma / 2.0).cos()).powi(2)).sum::<f64>() * FRAC_PI_2)
            .unwrap_or(0.0)
    }

    /// Every (merged) raw jump is a single transition.
    pub fn is_simple(&self) -> bool {
        self.merged().len() == self.iota()
    }

    /// Wall positions and signs of a simple step function.
    pub fn transition_profile(&self) -> Result<(Vec<f64>, Vec<Sign>)> {
        if !self.is_simple() {
            return Err(NeelError::Domain("step function is not simple".into()));
        }
        let a = self.alpha;
        let mut left = self.base;
        let mut pos = Vec::new();
        let mut signs = Vec::new();
        for j in self.merged() {
            let w = j.size;
            let d = if (a - FRAC_PI_2).abs() < TOL {
                // both atom sizes equal π; the left limit decides
                let from_minus = plateau_type(left, a) == Some(-1);
                if (from_minus && w > 0.0) || (!from_minus && w < 0.0) {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            } else if (w.abs() - 2.0 * a).abs() < TOL {
                Sign::Plus
            } else {
                Sign::Minus
            };
            pos.push(j.b);
            signs.push(d);
            left += w;
        }
        Ok((pos, signs))
    }

    /// Rebuild raw jumps from atoms by summing those sharing a location.
    pub fn recompose(alpha: f64, base: f64, atoms: &[Atom]) -> Result<Self> {
        let mut jumps: Vec<Jump> = Vec::new();
        for t in atoms {
            match jumps.last_mut() {
                Some(last) if last.b == t.b => last.size += t.sigma,
                _ => jumps.push(Jump { b: t.b, size: t.sigma }),
            }
        }
        Self::new(alpha, base, jumps)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// `Γ` of the transition profile of a simple step function times `π/2`.
pub fn simple_energy(step: &StepFunction) -> Result<f64> {
    let (_, d) = step.transition_profile()?;
    Ok(FRAC_PI_2 * gammas(&d, step.alpha()).total)
}

/// Alternating signs of length `n` led by `first`.
pub fn alternating(n: usize, first: Sign) -> Vec<Sign> {
    Sign::alternating(n, first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_pi_jump_splits_in_two() {
        let a = PI / 4.0;
        let s = StepFunction::new(a, -a, vec![Jump { b: 0.0, size: 2.0 * PI }]).unwrap();
        let atoms = s.decompose().unwrap();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].sigma - FRAC_PI_2).abs() < 1e-15);
        assert!((atoms[1].sigma - 1.5 * PI).abs() < 1e-15);
        assert!(!s.is_simple());
    }

    #[test]
    fn off_lattice_rejected() {
        assert!(StepFunction::new(1.0, 0.3, vec![]).is_err());
        assert!(StepFunction::new(1.0, 1.0, vec![Jump { b: 0.0, size: 0.0 }]).is_err());
        assert!(StepFunction::new(1.0, 1.0, vec![Jump { b: 0.0, size: 2.0 }]).is_err());
    }
}
