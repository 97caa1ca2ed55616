//! One-dimensional quadrature rules: Gauss–Legendre, tanh-sinh, exp-sinh and
//! the truncated trapezoid rule on the real line.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const GL_ORDER: usize = 20;

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

pub fn gl20() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn finite(z: Complex64, at: f64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Nonconvergence(format!("non-finite integrand at {at}")))
    }
}

/// Gauss–Legendre on a straight complex segment, ∫ f(z) dz.
pub fn gl_segment<F>(f: &F, a: Complex64, b: Complex64) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for &(x, w) in gl20() {
        let v = finite(f(mid + half * x), x)?;
        sum += v * w;
        abs += v.norm() * w;
    }
    Ok((sum * half, abs * half.norm()))
}

/// tanh-sinh on a real interval for a complex-valued integrand.
pub fn tanh_sinh<F>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let t_max = 4.5;
    let node = |t: f64| -> (f64, f64, f64) {
        let u = 0.5 * PI * t.sinh();
        let c = u.cosh();
        // distance to the nearer endpoint in units of half, without cancellation
        let comp = 1.0 / (u.abs().exp() * c);
        let w = 0.5 * PI * t.cosh() / (c * c);
        (u.tanh(), comp, w)
    };
    let eval = |t: f64| -> Result<Complex64> {
        let (x, comp, w) = node(t);
        if comp == 0.0 || w == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let pt = if x >= 0.0 { b - half * comp } else { a + half * comp };
        Ok(finite(f(pt), pt)? * w)
    };
    let mut h = 0.5;
    let first = eval(0.0)?;
    let (mut sum, mut abs) = (first, first.norm());
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        let (p, m) = (eval(t)?, eval(-t)?);
        sum += p + m;
        abs += p.norm() + m.norm();
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _level in 0..9 {
        h /= 2.0;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            let (p, m) = (eval(t)?, eval(-t)?);
            sum += p + m;
            abs += p.norm() + m.norm();
            k += 2;
        }
        let next = sum * h * half;
        let diff = (next - estimate).norm();
        estimate = next;
        // below the roundoff floor of ∫|f| the relative test cannot be met
        let floor = 64.0 * f64::EPSILON * abs * h * half.abs();
        if diff <= rel_tol * estimate.norm().max(1e-300) || diff <= floor {
            return Ok(estimate);
        }
    }
    if estimate.norm() < 1e-300 {
        return Ok(estimate);
    }
    Err(Error::Nonconvergence("tanh-sinh levels exhausted".into()))
}

/// Composite Gauss–Legendre on [a, ∞) for integrands with exponential decay.
/// Panels grow geometrically; stops once a panel is negligible.
pub fn half_line<F>(f: &F, a: f64, first_width: f64, rel_tol: f64, max_panels: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let g = |z: Complex64| f(z.re);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut left = a;
    let mut width = first_width;
    let mut quiet = 0;
    for _ in 0..max_panels {
        let (s, ab) = gl_segment(&g, Complex64::new(left, 0.0), Complex64::new(left + width, 0.0))?;
        sum += s;
        abs += ab;
        if ab <= 1e-3 * rel_tol * abs {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        left += width;
        width *= 1.25;
    }
    Err(Error::Decay { magnitude: abs, radius: left })
}

/// Outcome of the trapezoid rule on ℝ: value, ∫|g|, final step and window.
pub struct TrapezoidResult {
    pub value: Complex64,
    pub abs_integral: f64,
    pub step: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub nodes: usize,
}

/// Walks outward from 0 with the given step until |g| falls below
/// `tiny` times the largest magnitude seen.
fn truncation_window<G>(g: &G, step: f64, max_nodes: usize) -> Result<(f64, f64, f64)>
where
    G: Fn(f64) -> Complex64,
{
    let tiny = 1e-18;
    let mut peak = g(0.0).norm();
    let mut bounds = [0.0f64; 2];
    let mut evaluated = 1usize;
    for (slot, dir) in [(0usize, -1.0f64), (1usize, 1.0f64)] {
        let mut quiet = 0;
        let mut k = 1usize;
        loop {
            let t = dir * k as f64 * step;
            let m = g(t).norm();
            if !m.is_finite() {
                return Err(Error::Nonconvergence(format!("non-finite integrand at t = {t}")));
            }
            evaluated += 1;
            peak = peak.max(m);
            if m <= tiny * peak && t.abs() >= 1.0 {
                quiet += 1;
                if quiet >= 4 {
                    bounds[slot] = t;
                    break;
                }
            } else {
                quiet = 0;
            }
            if evaluated > max_nodes / 4 {
                return Err(Error::Decay { magnitude: m, radius: t.abs() });
            }
            k += 1;
        }
    }
    Ok((bounds[0], bounds[1], peak))
}

/// Trapezoid rule on ℝ with step halving and magnitude-based truncation.
pub fn trapezoid_real_line<G>(g: &G, initial_step: f64, rel_tol: f64, max_nodes: usize) -> Result<TrapezoidResult>
where
    G: Fn(f64) -> Complex64,
{
    let (t_lo, t_hi, _) = truncation_window(g, initial_step, max_nodes)?;
    let mut step = initial_step;
    let mut k_lo = (t_lo / step).round() as i64;
    let mut k_hi = (t_hi / step).round() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut nodes = 0usize;
    let add = |t: f64, sum: &mut Complex64, abs: &mut f64| -> Result<()> {
        let v = g(t);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Nonconvergence(format!("non-finite integrand at t = {t}")));
        }
        *sum += v;
        *abs += v.norm();
        Ok(())
    };
    for k in k_lo..=k_hi {
        add(k as f64 * step, &mut sum, &mut abs)?;
        nodes += 1;
    }
    let mut estimate = sum * step;
    for level in 1..=40 {
        step /= 2.0;
        k_lo *= 2;
        k_hi *= 2;
        if nodes + ((k_hi - k_lo) / 2) as usize > max_nodes {
            return Err(Error::Nonconvergence(format!(
                "trapezoid rule needs more than {max_nodes} nodes"
            )));
        }
        let mut k = k_lo + 1;
        while k < k_hi {
            add(k as f64 * step, &mut sum, &mut abs)?;
            nodes += 1;
            k += 2;
        }
        let next = sum * step;
        let diff = (next - estimate).norm();
        estimate = next;
        let scale = (abs * step).max(estimate.norm());
        if level >= 2 && diff <= rel_tol * scale {
            return Ok(TrapezoidResult {
                value: estimate,
                abs_integral: abs * step,
                step,
                t_lo,
                t_hi,
                nodes,
            });
        }
    }
    Err(Error::Nonconvergence("trapezoid step underflow".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(20);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(38)).sum();
        assert!((s - 2.0 / 39.0).abs() < 1e-14);
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 dx / sqrt(x) = 2
        let v = tanh_sinh(&|x: f64| Complex64::new(1.0 / x.sqrt(), 0.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((v.re - 2.0).abs() < 1e-10);
    }

    #[test]
    fn half_line_exponential() {
        let v = half_line(&|x: f64| Complex64::new((-x).exp(), 0.0), 1.0, 0.5, 1e-13, 400).unwrap();
        assert!((v.re - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_gaussian() {
        let r = trapezoid_real_line(&|t: f64| Complex64::new((-t * t).exp(), 0.0), 0.5, 1e-13, 100_000).unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }
}
