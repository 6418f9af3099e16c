//! The interaction kernel `I(t) = ∫_0^∞ s e^{-s}/(s²+t²) ds`, its constant
//! `I_0 = -γ`, derivatives, and the ratio equation used for three-wall
//! critical points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NeelError, Result};
use crate::quad::{self, Integral};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Quadrature settings for the kernel evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper end of the finite part of semi-infinite integrals.
    pub truncation: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, truncation: 60.0, max_depth: 40 }
    }
}

/// A computed value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialValue {
    pub value: f64,
    pub error: f64,
}

/// Below this argument `I` is taken from its small-`t` expansion.
pub const SMALL_T: f64 = 1e-6;

fn check_positive(t: f64, what: &str) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(NeelError::Domain(format!("{what} requires t > 0, got {t}")));
    }
    Ok(())
}

fn finish(r: Integral, spec: &QuadratureSpec, what: &str) -> Result<SpecialValue> {
    let tol = spec.abs_tol.max(spec.rel_tol * r.value.abs());
    if r.error <= 10.0 * tol && r.value.is_finite() {
        Ok(SpecialValue { value: r.value, error: r.error })
    } else {
        Err(NeelError::Accuracy { message: what.to_string(), estimate: r.value, error: r.error })
    }
}

/// `∫_0^∞ s^p e^{-s}/(s²+t²) ds`.
fn moment(p: i32, t: f64, spec: &QuadratureSpec) -> Integral {
    if t >= LARGE_T {
        return moment_asymptotic(p, t);
    }
    let h = |s: f64| s.powi(p) / (s * s + t * t);
    let c = (2.0 + t).min(spec.truncation);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    let mut breaks = vec![0.0];
    let mut b = t;
    while b < c {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(c);
    for w in breaks.windows(2) {
        let r = quad::adaptive(
            |s| h(s) * (-s).exp(),
            w[0],
            w[1],
            spec.abs_tol * 0.1,
            spec.rel_tol * 0.1,
            spec.max_depth,
        );
        value += r.value;
        error += r.error;
        converged &= r.converged;
    }
    if c < spec.truncation {
        let scale = (-c).exp();
        let hi = quad::laguerre(64);
        let lo = quad::laguerre(48);
        let sum = |rule: &quad::GaussRule| -> f64 {
            rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * h(c + x)).sum::<f64>()
        };
        let a = sum(hi);
        let b = sum(lo);
        value += scale * a;
        error += scale * (a - b).abs();
    } else {
        // tail beyond the truncation point is below e^{-truncation} * c^{p-2}
        error += (-c).exp() * c.powi(p - 1);
    }
    Integral { value, error, converged }
}

/// Above this argument the moments come from their asymptotic series.
pub const LARGE_T: f64 = 40.0;

/// `Σ_k (-1)^k (2k+p)! / t^{2k+2}`, truncated at its smallest term.
fn moment_asymptotic(p: i32, t: f64) -> Integral {
    let inv = 1.0 / (t * t);
    let mut term: f64 = (1..=p).map(f64::from).product::<f64>() * inv;
    let mut sum = 0.0;
    let mut k = 0;
    loop {
        sum += term;
        let kf = k as f64;
        let next = -term * (2.0 * kf + p as f64 + 1.0) * (2.0 * kf + p as f64 + 2.0) * inv;
        if next.abs() >= term.abs() || next.abs() < 1e-18 * sum.abs() {
            return Integral { value: sum, error: next.abs(), converged: true };
        }
        term = next;
        k += 1;
    }
}

/// `I(t)` for `t > 0`.
pub fn eval_i(t: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    check_positive(t, "I")?;
    if t < SMALL_T {
        let value = -t.ln() - EULER_GAMMA + std::f64::consts::FRAC_PI_2 * t;
        return Ok(SpecialValue { value, error: t * t * (2.0 - t.ln()) });
    }
    finish(moment(1, t, spec), spec, "I(t)")
}

/// `I_0 = ∫_0^∞ e^{-s} log s ds`.
pub fn eval_i0(spec: &QuadratureSpec) -> Result<SpecialValue> {
    // ∫_0^1 e^{-s} log s ds as an alternating series
    let mut head = 0.0;
    let mut fact = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..40 {
        if k > 0 {
            fact *= k as f64;
        }
        let kp1 = (k + 1) as f64;
        let term = if k % 2 == 0 { 1.0 } else { -1.0 } / (fact * kp1 * kp1);
        head -= term;
        last = term.abs();
        if last < 1e-18 {
            break;
        }
    }
    // e^{-1} ∫_0^∞ e^{-x} log(1+x) dx
    let hi = quad::laguerre(64);
    let lo = quad::laguerre(48);
    let tail = |rule: &quad::GaussRule| -> f64 {
        rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * (1.0 + x).ln()).sum::<f64>()
    };
    let a = tail(hi);
    let b = tail(lo);
    let value = head + (-1f64).exp() * a;
    let error = last + (-1f64).exp() * (a - b).abs();
    let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
    if error > 10.0 * tol {
        return Err(NeelError::Accuracy { message: "I_0".into(), estimate: value, error });
    }
    Ok(SpecialValue { value, error })
}

/// `I(t)` through `∫_0^∞ cos s/(s+t) ds`.
pub fn eval_i_alt(t: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    check_positive(t, "I (cosine form)")?;
    let r = quad::cosine_transform(|s| 1.0 / (s + t), spec.abs_tol, spec.max_depth);
    finish(r, spec, "I(t) cosine form")
}

/// `I'(t) = -(1/t) ∫ σ² e^{-σ}/(σ²+t²) dσ`.
pub fn eval_i_prime(t: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    check_positive(t, "I'")?;
    let m = finish(moment(2, t, spec), spec, "I'(t)")?;
    Ok(SpecialValue { value: -m.value / t, error: m.error / t })
}

/// `I''(t) = (1/t²) ∫ σ³ e^{-σ}/(σ²+t²) dσ`.
pub fn eval_i_second(t: f64, spec: &QuadratureSpec) -> Result<SpecialValue> {
    check_positive(t, "I''")?;
    let m = finish(moment(3, t, spec), spec, "I''(t)")?;
    Ok(SpecialValue { value: m.value / (t * t), error: m.error / (t * t) })
}

/// `I'(2t) / I'(t)`, which decreases from 1/2 to 1/8 on `(0, ∞)`.
pub fn derivative_ratio(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_positive(t, "derivative ratio")?;
    let a = finish(moment(2, 2.0 * t, spec), spec, "I'(2t)")?;
    let b = finish(moment(2, t, spec), spec, "I'(t)")?;
    Ok(a.value / (2.0 * b.value))
}

/// Root `t₀ > 0` of `I'(2t) = q I'(t)`; exists iff `1/8 < q < 1/2`.
pub fn ratio_root(q: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(q > 0.125 && q < 0.5) {
        return Err(NeelError::Domain(format!("ratio root requires 1/8 < q < 1/2, got {q}")));
    }
    let g = |u: f64| derivative_ratio(u.exp(), spec).map(|r| r - q);
    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    // g is positive at small t and negative at large t
    while g(lo)? <= 0.0 {
        lo -= 2.0;
        if lo < -40.0 {
            return Err(NeelError::Accuracy { message: "ratio root bracket".into(), estimate: lo.exp(), error: f64::INFINITY });
        }
    }
    while g(hi)? >= 0.0 {
        hi += 1.0;
        if hi > 12.0 {
            return Err(NeelError::Accuracy { message: "ratio root bracket".into(), estimate: hi.exp(), error: f64::INFINITY });
        }
    }
    let mut failure = None;
    let root = quad::brent(
        |u| match g(u) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        lo,
        hi,
        1e-14,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    root.map(f64::exp)
        .ok_or_else(|| NeelError::Accuracy { message: "ratio root iteration".into(), estimate: f64::NAN, error: f64::INFINITY })
}

/// `e^z E_1(z) = ∫_0^∞ e^{-s}/(s+z) ds` for `z` off the closed negative real axis.
pub fn exp_e1(z: Complex64) -> Complex64 {
    if z.norm() < 4.0 {
        exp_e1_series(z)
    } else {
        exp_e1_fraction(z)
    }
}

fn exp_e1_series(z: Complex64) -> Complex64 {
    // E_1(z) = -γ - log z - Σ (-z)^k/(k k!)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..200 {
        term *= -z / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    z.exp() * (-EULER_GAMMA - z.ln() - sum)
}

fn exp_e1_fraction(z: Complex64) -> Complex64 {
    // 1/(z+1- 1/(z+3- 4/(z+5- ...))) by modified Lentz on the tail after the first term
    let tiny = 1e-300;
    let mut f = z + 1.0;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..2000 {
        let nf = n as f64;
        let a = -nf * nf;
        let b = z + 2.0 * nf + 1.0;
        d = b + a * d;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        c = b + a * c.inv();
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    f.inv()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_t_branch_is_continuous() {
        let s = QuadratureSpec::default();
        let expansion = |t: f64| -t.ln() - EULER_GAMMA + std::f64::consts::FRAC_PI_2 * t;
        let t = SMALL_T * 1.001;
        let a = eval_i(t, &s).unwrap().value;
        assert!((a - expansion(t)).abs() < 1e-9, "{a} {}", expansion(t));
        let t = SMALL_T * 0.999;
        let b = eval_i_alt(t, &s).unwrap().value;
        assert!((eval_i(t, &s).unwrap().value - b).abs() < 1e-9, "{b}");
    }

    #[test]
    fn exp_e1_branches_agree() {
        for k in 0..24 {
            let th = -3.0 + 6.0 * k as f64 / 23.0;
            let z = Complex64::from_polar(4.0, th);
            let d = (exp_e1_series(z) - exp_e1_fraction(z)).norm();
            assert!(d < 1e-11 * exp_e1_series(z).norm(), "{z} {d}");
        }
        assert!((exp_e1(Complex64::new(1.0, 0.0)).re - 0.596_347_362_323_194).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        let s = QuadratureSpec::default();
        assert!(matches!(eval_i(0.0, &s), Err(NeelError::Domain(_))));
        assert!(matches!(eval_i(-1.0, &s), Err(NeelError::Domain(_))));
        assert!(matches!(ratio_root(0.6, &s), Err(NeelError::Domain(_))));
    }
}
