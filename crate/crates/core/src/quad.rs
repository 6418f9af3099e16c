//! Quadrature and root-finding primitives shared by the evaluators.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a Gauss rule.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrate `f` over `[a, b]` (Legendre rules only).
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }
}

/// Gauss–Legendre rule on `[-1, 1]` with `n` points, by Newton iteration.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Laguerre rule for weight `e^{-x}` on `[0, ∞)` (Golub–Welsch).
pub fn gauss_laguerre(n: usize) -> GaussRule {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = 2.0 * i as f64 + 1.0;
        if i + 1 < n {
            let b = (i as f64 + 1.0).abs();
            jac[(i, i + 1)] = b;
            jac[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

pub(crate) fn laguerre(n: usize) -> &'static GaussRule {
    static L48: OnceLock<GaussRule> = OnceLock::new();
    static L64: OnceLock<GaussRule> = OnceLock::new();
    match n {
        48 => L48.get_or_init(|| gauss_laguerre(48)),
        64 => L64.get_or_init(|| gauss_laguerre(64)),
        _ => panic!("unsupported Laguerre order {n}"),
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod 7/15 panel: (kronrod estimate, |kronrod - gauss|).
pub fn gauss_kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod integration on a finite interval.
///
/// Panels are bisected largest-error first until the total error estimate
/// falls below `max(abs_tol, rel_tol * |value|)` or every splittable panel
/// has reached `max_depth`.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0, converged: true };
    }
    let (v, e) = gauss_kronrod15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e, depth: 0 });
    let mut total_v = v;
    let mut total_e = e;
    let mut frozen_v = 0.0;
    let mut frozen_e = 0.0;
    let max_panels = 20_000;
    let mut count = 1;
    loop {
        let tol = abs_tol.max(rel_tol * total_v.abs());
        if total_e <= tol {
            return Integral { value: total_v, error: total_e, converged: true };
        }
        let Some(p) = heap.pop() else {
            return Integral { value: total_v, error: total_e, converged: total_e <= tol };
        };
        if p.depth >= max_depth || count >= max_panels {
            frozen_v += p.value;
            frozen_e += p.error;
            if heap.is_empty() || count >= max_panels {
                let rest_v: f64 = heap.iter().map(|q| q.value).sum();
                let rest_e: f64 = heap.iter().map(|q| q.error).sum();
                let value = frozen_v + rest_v;
                let error = frozen_e + rest_e;
                return Integral { value, error, converged: error <= abs_tol.max(rel_tol * value.abs()) };
            }
            continue;
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gauss_kronrod15(&mut f, p.a, m);
        let (v2, e2) = gauss_kronrod15(&mut f, m, p.b);
        total_v += v1 + v2 - p.value;
        total_e += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1, depth: p.depth + 1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2, depth: p.depth + 1 });
        count += 1;
    }
}

/// Sum of an alternating-type series given its partial sums, accelerated by
/// repeated averaging (Euler–van Wijngaarden).
///
/// Returns (estimate, error estimate).
pub fn averaged_limit(partial: &[f64]) -> (f64, f64) {
    let n = partial.len();
    if n == 0 {
        return (0.0, f64::INFINITY);
    }
    if n == 1 {
        return (partial[0], f64::INFINITY);
    }
    let mut row = partial.to_vec();
    let mut prev_top = row[row.len() - 1];
    let mut best = (prev_top, f64::INFINITY);
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let top = row[row.len() - 1];
        let diff = (top - prev_top).abs();
        if diff <= best.1 {
            best = (top, diff);
        }
        prev_top = top;
    }
    best
}

/// `∫_0^∞ g(s) cos(s) ds` for `g` smooth on `[0, ∞)` and decaying at least
/// like `1/s`, by summing half-period pieces and averaging the partial sums.
pub fn cosine_transform<F: FnMut(f64) -> f64>(mut g: F, abs_tol: f64, max_depth: u32) -> Integral {
    use std::f64::consts::{FRAC_PI_2, PI};
    let piece_tol = abs_tol * 1e-2;
    let first = adaptive(|s| g(s) * s.cos(), 0.0, FRAC_PI_2, piece_tol, 1e-14, max_depth);
    let mut sum = first.value;
    let mut piece_err = first.error;
    let mut partial = Vec::with_capacity(64);
    let mut last_est = f64::NAN;
    let mut k = 1usize;
    let mut converged = first.converged;
    let max_pieces = 4000;
    loop {
        let a = (k as f64 - 0.5) * PI;
        let b = (k as f64 + 0.5) * PI;
        let p = adaptive(|s| g(s) * s.cos(), a, b, piece_tol, 1e-14, max_depth);
        converged &= p.converged;
        piece_err += p.error;
        sum += p.value;
        partial.push(sum);
        if partial.len() > 24 {
            partial.remove(0);
        }
        if partial.len() >= 12 {
            let (est, err) = averaged_limit(&partial);
            let shift = (est - last_est).abs();
            last_est = est;
            if err.max(shift) < abs_tol * 0.1 || k >= max_pieces {
                let total = err.max(shift) + piece_err;
                return Integral { value: est, error: total, converged: converged && total <= abs_tol * 10.0 };
            }
        }
        k += 1;
    }
}

/// Brent's method on a bracketing interval `[a, b]`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(10);
        let v = r.integrate(0.0, 2.0, |x| x.powi(19));
        assert!((v - 2f64.powi(20) / 20.0).abs() < 1e-9);
    }

    #[test]
    fn laguerre_moments() {
        let r = laguerre(48);
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(5)).sum();
        assert!((v - 120.0).abs() < 1e-9);
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        let r = adaptive(|x| x.ln(), 0.0, 1.0, 1e-12, 1e-12, 50);
        assert!((r.value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn cosine_transform_of_decaying_rational() {
        // ∫ cos s /(1+s²) ds = π e^{-1} / 2
        let r = cosine_transform(|s| 1.0 / (1.0 + s * s), 1e-10, 40);
        assert!((r.value - std::f64::consts::PI * (-1f64).exp() / 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn brent_finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }
}
