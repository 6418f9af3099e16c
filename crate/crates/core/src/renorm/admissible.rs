use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::geometry::{check_alpha, gammas, Sign};

/// Critical angle `θ_N`.
pub fn theta_n(n: usize) -> f64 {
    if n <= 2 {
        return 0.0;
    }
    let nf = n as f64;
    let c = if n % 2 == 1 { ((nf + 1.0).sqrt() - 1.0) / nf } else { (nf.sqrt() - 1.0) / (nf - 1.0) };
    c.acos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibleCase {
    Even,
    OddLeadingPlus,
    OddLeadingMinus,
}

/// Interval `Θ` of angles for which alternating walls repel overall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRange {
    pub lower: f64,
    pub upper: f64,
    pub case: AdmissibleCase,
}

impl AdmissibleRange {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha > self.lower && alpha < self.upper
    }
}

fn is_alternating(d: &[Sign]) -> bool {
    d.windows(2).all(|w| w[0] != w[1])
}

/// `Θ` for an alternating sign vector.
pub fn admissible_range(d: &[Sign]) -> Result<AdmissibleRange> {
    let n = d.len();
    if n < 2 {
        return Err(NeelError::Domain("admissible range needs at least two walls".into()));
    }
    if !is_alternating(d) {
        return Err(NeelError::Domain("admissible range needs alternating signs".into()));
    }
    let r = if n % 2 == 0 {
        AdmissibleRange { lower: theta_n(n), upper: PI - theta_n(n), case: AdmissibleCase::Even }
    } else if d[0] == Sign::Plus {
        AdmissibleRange { lower: theta_n(n - 2), upper: PI - theta_n(n), case: AdmissibleCase::OddLeadingPlus }
    } else {
        AdmissibleRange { lower: theta_n(n), upper: PI - theta_n(n - 2), case: AdmissibleCase::OddLeadingMinus }
    };
    Ok(r)
}

/// `Σ_{K≤k<ℓ≤L} γ_k γ_ℓ` with zero-based inclusive indices.
pub fn sign_sum(d: &[Sign], alpha: f64, first: usize, last: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if first >= last || last >= d.len() {
        return Err(NeelError::Domain(format!(
            "sign sum needs first < last < {}, got {first}, {last}",
            d.len()
        )));
    }
    let g = gammas(&d[first..=last], alpha).gamma;
    let total: f64 = g.iter().sum();
    let squares: f64 = g.iter().map(|x| x * x).sum();
    Ok(0.5 * (total * total - squares))
}

/// Closed form of the sign sum over `k` alternating walls whose first sign
/// is `first`.
pub fn alternating_sign_sum(k: usize, alpha: f64, first: Sign) -> f64 {
    let c = alpha.cos();
    let kf = k as f64;
    if k % 2 == 0 {
        0.5 * kf * ((kf - 1.0) * c * c - 1.0)
    } else {
        let lin = match first {
            Sign::Plus => -2.0 * c,
            Sign::Minus => 2.0 * c,
        };
        0.5 * (kf - 1.0) * (kf * c * c + lin - 1.0)
    }
}

/// Whether every contiguous sub-block sum is negative.
pub fn all_subblock_sums_negative(d: &[Sign], alpha: f64) -> bool {
    positive_subblock(d, alpha).is_none()
}

/// A contiguous block `(first, last)` whose sign sum is nonnegative, preferring the
/// largest sum.
pub fn positive_subblock(d: &[Sign], alpha: f64) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), f64)> = None;
    for k in 0..d.len() {
        for l in k + 1..d.len() {
            let s = sign_sum(d, alpha, k, l).ok()?;
            if s >= 0.0 && best.is_none_or(|(_, b)| s > b) {
                best = Some(((k, l), s));
            }
        }
    }
    best.map(|b| b.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert_eq!(theta_n(2), 0.0);
        assert!((theta_n(3) - (1.0f64 / 3.0).acos()).abs() < 1e-15);
        assert!((theta_n(4) - (1.0f64 / 3.0).acos()).abs() < 1e-15);
        for n in 0..40 {
            assert!(theta_n(n + 1) >= theta_n(n));
        }
    }

    #[test]
    fn ranges() {
        let r = admissible_range(&Sign::alternating(3, Sign::Plus)).unwrap();
        assert_eq!(r.lower, 0.0);
        assert!((r.upper - (PI - (1.0f64 / 3.0).acos())).abs() < 1e-15);
        let r = admissible_range(&Sign::alternating(3, Sign::Minus)).unwrap();
        assert!((r.lower - (1.0f64 / 3.0).acos()).abs() < 1e-15);
        assert_eq!(r.upper, PI);
        assert!(admissible_range(&[Sign::Plus, Sign::Plus]).is_err());
    }

    #[test]
    fn two_walls_always_repel() {
        for k in 1..50 {
            let a = PI * k as f64 / 50.0;
            assert!(all_subblock_sums_negative(&[Sign::Plus, Sign::Minus], a));
            let s = sign_sum(&[Sign::Plus, Sign::Minus], a, 0, 1).unwrap();
            assert!((s - (a.cos().powi(2) - 1.0)).abs() < 1e-14);
        }
    }
}
