//! Complex Gamma machinery and the small helpers every other module leans on.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type ComplexValue = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
/// Below this modulus the Stirling series is not used directly.
const STIRLING_RADIUS: f64 = 15.0;

/// Bernoulli numbers B_0..B_22 (B_1 = -1/2).
const BERNOULLI: [f64; 23] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174611.0 / 330.0,
    0.0,
    854513.0 / 138.0,
];

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The deformation parameter ħ and the trace shift γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformParams {
    hbar: f64,
    gamma: Complex64,
}

impl DeformParams {
    pub fn new(hbar: f64, gamma: Complex64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !(gamma.re.is_finite() && gamma.im.is_finite()) || (gamma / hbar).re <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Re(gamma/hbar) must be positive, got gamma = {gamma}"
            )));
        }
        Ok(Self { hbar, gamma })
    }

    pub fn real(hbar: f64, gamma: f64) -> Result<Self> {
        Self::new(hbar, real(gamma))
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    /// True when γ = 2ħ up to roundoff.
    pub fn is_free_point(&self) -> bool {
        (self.gamma - 2.0 * self.hbar).norm() <= 1e-12 * self.hbar
    }
}

/// Tolerances and budgets shared by all evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_quad_nodes: usize,
    pub max_ladder_terms: usize,
    pub product_truncation: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_quad_nodes: 400_000,
            max_ladder_terms: 200,
            product_truncation: 200,
        }
    }
}

impl PrecisionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 100.0 * f64::EPSILON) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol {} is below 100 machine epsilons",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("abs_tol must be positive".into()));
        }
        if self.max_quad_nodes == 0 || self.max_ladder_terms == 0 || self.product_truncation == 0 {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Nearest non-positive integer when `z` sits on it (to roundoff).
fn pole_of_gamma(z: Complex64) -> Option<f64> {
    let n = z.re.round();
    if n > 0.0 {
        return None;
    }
    let tol = 1e-14 * (1.0 + n.abs());
    if (z.re - n).abs() <= tol && z.im.abs() <= tol {
        Some(n)
    } else {
        None
    }
}

pub fn is_gamma_pole(z: Complex64) -> bool {
    pole_of_gamma(z).is_some()
}

fn stirling_ln_gamma(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=10 {
        let b = BERNOULLI[2 * k];
        series += term * (b / ((2 * k) as f64 * (2 * k - 1) as f64));
        term *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// Number of unit shifts that move `z` into the Stirling region.
fn stirling_shift(z: Complex64) -> usize {
    if z.re >= 0.0 && z.norm() >= STIRLING_RADIUS {
        0
    } else if z.im.abs() >= STIRLING_RADIUS {
        (-z.re).ceil().max(0.0) as usize
    } else {
        (STIRLING_RADIUS - z.re).ceil().max(0.0) as usize
    }
}

/// Principal branch of log Γ, continuous on the plane cut along (-∞, 0].
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite argument {z}")));
    }
    if let Some(n) = pole_of_gamma(z) {
        return Err(Error::Pole { location: real(n) });
    }
    let shift = stirling_shift(z);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        acc += (z + k as f64).ln();
    }
    Ok(stirling_ln_gamma(z + shift as f64) - acc)
}

pub fn gamma_fn(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re > 0.0 && z.re <= 20.0 && z.re.fract() == 0.0 {
        let mut f = 1.0;
        for k in 2..(z.re as u64) {
            f *= k as f64;
        }
        return Ok(real(f));
    }
    Ok(log_gamma(z)?.exp())
}

/// Γ(a)/Γ(b) through the log-domain difference.
pub fn gamma_ratio(a: Complex64, b: Complex64) -> Result<Complex64> {
    if let Some(n) = pole_of_gamma(a) {
        return Err(Error::Pole { location: real(n) });
    }
    if let Some(n) = pole_of_gamma(b) {
        return Err(Error::Zero { location: real(n) });
    }
    if a == b {
        return Ok(real(1.0));
    }
    Ok((log_gamma(a)? - log_gamma(b)?).exp())
}

/// Split `z` as n + f with n the nearest integer to Re z.
fn reduce(z: Complex64) -> (f64, Complex64) {
    let n = z.re.round();
    (n, Complex64::new(z.re - n, z.im))
}

fn parity_sign(n: f64) -> f64 {
    if (n.rem_euclid(2.0)) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn sin_pi(z: Complex64) -> Complex64 {
    let (n, f) = reduce(z);
    (f * PI).sin() * parity_sign(n)
}

pub fn cos_pi(z: Complex64) -> Complex64 {
    let (n, f) = reduce(z);
    (f * PI).cos() * parity_sign(n)
}

pub fn cot_pi(z: Complex64) -> Result<Complex64> {
    let (n, f) = reduce(z);
    if f.norm() <= 1e-15 * (1.0 + n.abs()) {
        return Err(Error::Pole { location: real(n) });
    }
    let w = f * PI;
    Ok(w.cos() / w.sin())
}

/// Some logarithm of sin(πz); stable for large |Im z| where sin itself overflows.
/// Only meant to be exponentiated, so the branch is irrelevant.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    let (n, f) = reduce(z);
    let parity = if parity_sign(n) < 0.0 { Complex64::new(0.0, PI) } else { Complex64::new(0.0, 0.0) };
    let i = Complex64::i();
    let w = f * PI;
    let core = if f.im.abs() < 5.0 {
        w.sin().ln()
    } else if f.im > 0.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / 2i
        -i * w + (((2.0 * i * w).exp() - 1.0) / (2.0 * i)).ln()
    } else {
        i * w + ((1.0 - (-2.0 * i * w).exp()) / (2.0 * i)).ln()
    };
    core + parity
}

pub fn ln_cos_pi(z: Complex64) -> Complex64 {
    ln_sin_pi(z + 0.5)
}

/// e^z - 1 without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    let em1 = z.re.exp_m1();
    let half = (z.im / 2.0).sin();
    Complex64::new(em1 * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

pub fn digamma(z: Complex64) -> Result<Complex64> {
    if let Some(n) = pole_of_gamma(z) {
        return Err(Error::Pole { location: real(n) });
    }
    let shift = stirling_shift(z);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..shift {
        acc += (z + k as f64).inv();
    }
    let w = z + shift as f64;
    let inv2 = (w * w).inv();
    let mut term = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=10 {
        series += term * (BERNOULLI[2 * k] / (2 * k) as f64);
        term *= inv2;
    }
    Ok(w.ln() - 0.5 / w - series - acc)
}

pub fn bernoulli_number(k: usize) -> f64 {
    BERNOULLI[k]
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for j in 0..k {
        b = b * (n - j) as f64 / (j + 1) as f64;
    }
    b
}

/// Bernoulli polynomial B_k(c), k ≤ 22.
pub fn bernoulli_poly(k: usize, c: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for j in (0..=k).rev() {
        acc += power * (binomial(k, j) * BERNOULLI[j]);
        power *= c;
    }
    acc
}

/// Hurwitz zeta ζ(s, a) for integer s ≥ 2 and real a > 0.
pub fn hurwitz_zeta(s: u32, a: f64) -> f64 {
    assert!(s >= 2 && a > 0.0);
    let sf = s as f64;
    let cut = 20.0;
    let mut sum = 0.0;
    let mut x = a;
    while x < cut {
        sum += x.powf(-sf);
        x += 1.0;
    }
    sum += x.powf(1.0 - sf) / (sf - 1.0) + 0.5 * x.powf(-sf);
    // Euler-Maclaurin corrections with rising factorials s(s+1)...(s+2j-2)
    let mut rising = sf;
    let mut fact = 2.0;
    let mut xpow = x.powf(-sf - 1.0);
    for j in 1..=8 {
        sum += BERNOULLI[2 * j] / fact * rising * xpow;
        rising *= (sf + (2 * j - 1) as f64) * (sf + (2 * j) as f64);
        fact *= ((2 * j + 1) * (2 * j + 2)) as f64;
        xpow /= x * x;
    }
    sum
}

/// base^exponent on the principal branch.
pub fn principal_pow(base: Complex64, exponent: f64) -> Complex64 {
    if exponent == 0.0 {
        return real(1.0);
    }
    if base.im == 0.0 && base.re > 0.0 {
        return real(base.re.powf(exponent));
    }
    (base.ln() * exponent).exp()
}

/// Relative distance used by every residual in the crate.
pub fn relative_residual(value: Complex64, reference: Complex64) -> f64 {
    let scale = value.norm().max(reference.norm());
    if scale == 0.0 {
        0.0
    } else {
        (value - reference).norm() / scale
    }
}
