//! The rational R-matrix on C²⊗C², its scalar factors and the unitarity,
//! crossing and Yang–Baxter checks.

use crate::error::{Error, Result};
use crate::special_core::{cot_pi, is_gamma_pole, log_gamma, real, DeformParams};
use num_complex::Complex64;
use std::ops::Mul;

const POLE_GUARD: f64 = 1e-8;

/// Dense 4×4 matrix in the basis (++, +−, −+, −−).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrix4(pub [[Complex64; 4]; 4]);

impl RMatrix4 {
    pub fn zero() -> Self {
        RMatrix4([[Complex64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = real(1.0);
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    /// Largest entry modulus of self − other.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Transpose in the first tensor factor.
    pub fn partial_transpose_first(&self) -> Self {
        let mut m = Self::zero();
        for (a, b, c, d) in indices() {
            m.0[2 * c + b][2 * a + d] = self.0[2 * a + b][2 * c + d];
        }
        m
    }

    /// A ⊗ id for a 2×2 matrix A.
    pub fn left_factor(a: [[Complex64; 2]; 2]) -> Self {
        let mut m = Self::zero();
        for (i, j, k, l) in indices() {
            if k == l {
                m.0[2 * i + k][2 * j + l] = a[i][j];
            }
        }
        m
    }
}

fn indices() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|n| (n >> 3 & 1, n >> 2 & 1, n >> 1 & 1, n & 1))
}

impl Mul for RMatrix4 {
    type Output = RMatrix4;
    fn mul(self, rhs: RMatrix4) -> RMatrix4 {
        let mut m = RMatrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

/// The fixed matrix ((0, −1), (1, 0)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChargeConjugation;

impl ChargeConjugation {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[real(0.0), real(-1.0)], [real(1.0), real(0.0)]]
    }
}

fn guard_gamma(z: Complex64) -> Result<Complex64> {
    let nearest = z.re.round();
    if nearest <= 0.0 && (z - nearest).norm() < POLE_GUARD {
        return Err(Error::Pole { location: z });
    }
    if is_gamma_pole(z) {
        return Err(Error::Pole { location: z });
    }
    log_gamma(z)
}

/// Γ(1/2 − x)Γ(1 + x)/(Γ(1/2 + x)Γ(1 − x)), x = z/2ħ.
pub fn r_scalar(z: Complex64, params: &DeformParams) -> Result<Complex64> {
    let x = z / (2.0 * params.hbar());
    let log = guard_gamma(0.5 - x)? + guard_gamma(1.0 + x)? - guard_gamma(0.5 + x)? - guard_gamma(1.0 - x)?;
    Ok(log.exp())
}

/// −cot(πz/2ħ).
pub fn tau_scalar(z: Complex64, params: &DeformParams) -> Result<Complex64> {
    let x = z / (2.0 * params.hbar());
    if (x - x.re.round()).norm() < POLE_GUARD {
        return Err(Error::Pole { location: z });
    }
    Ok(-cot_pi(x)?)
}

/// Γ(1+x)Γ(−x)/(Γ(1/2+x)Γ(1/2−x)), the Gamma form of τ.
pub fn tau_scalar_gamma_form(z: Complex64, params: &DeformParams) -> Result<Complex64> {
    let x = z / (2.0 * params.hbar());
    let log = guard_gamma(1.0 + x)? + guard_gamma(-x)? - guard_gamma(0.5 + x)? - guard_gamma(0.5 - x)?;
    Ok(log.exp())
}

/// b(z) = z/(z+ħ), c(z) = ħ/(z+ħ).
pub fn weights(z: Complex64, params: &DeformParams) -> Result<(Complex64, Complex64)> {
    let d = z + params.hbar();
    if d.norm() < POLE_GUARD {
        return Err(Error::Pole { location: z });
    }
    Ok((z / d, params.hbar() / d))
}

pub fn rbar_matrix(z: Complex64, params: &DeformParams) -> Result<RMatrix4> {
    let (b, c) = weights(z, params)?;
    let mut m = RMatrix4::zero();
    m.0[0][0] = real(1.0);
    m.0[3][3] = real(1.0);
    m.0[1][1] = b;
    m.0[2][2] = b;
    m.0[1][2] = c;
    m.0[2][1] = c;
    Ok(m)
}

pub fn r_full(z: Complex64, params: &DeformParams) -> Result<RMatrix4> {
    Ok(rbar_matrix(z, params)?.scale(r_scalar(z, params)?))
}

/// max |R(z)R(−z) − I|.
pub fn check_unitarity(z: Complex64, params: &DeformParams) -> Result<f64> {
    let prod = r_full(z, params)? * r_full(-z, params)?;
    Ok(prod.max_distance(&RMatrix4::identity()))
}

/// max |(C⊗id)R(z)(C⊗id) − R^{t₁}(−z−ħ)|.
pub fn check_crossing(z: Complex64, params: &DeformParams) -> Result<f64> {
    let c = RMatrix4::left_factor(ChargeConjugation.matrix());
    let lhs = c * r_full(z, params)? * c;
    let rhs = r_full(-z - params.hbar(), params)?.partial_transpose_first();
    Ok(lhs.max_distance(&rhs))
}

fn embed(m: &RMatrix4, first: usize, second: usize) -> [[Complex64; 8]; 8] {
    let mut out = [[Complex64::new(0.0, 0.0); 8]; 8];
    let bit = |n: usize, slot: usize| (n >> (2 - slot)) & 1;
    for row in 0..8 {
        for col in 0..8 {
            let third = 3 - first - second;
            if bit(row, third) != bit(col, third) {
                continue;
            }
            let r = 2 * bit(row, first) + bit(row, second);
            let c = 2 * bit(col, first) + bit(col, second);
            out[row][col] = m.0[r][c];
        }
    }
    out
}

fn mul8(a: &[[Complex64; 8]; 8], b: &[[Complex64; 8]; 8]) -> [[Complex64; 8]; 8] {
    let mut out = [[Complex64::new(0.0, 0.0); 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[i][j] = (0..8).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// max |R̄₁₂(z₁−z₂)R̄₁₃(z₁)R̄₂₃(z₂) − R̄₂₃(z₂)R̄₁₃(z₁)R̄₁₂(z₁−z₂)|.
pub fn check_yang_baxter(z1: Complex64, z2: Complex64, params: &DeformParams) -> Result<f64> {
    let r12 = embed(&rbar_matrix(z1 - z2, params)?, 0, 1);
    let r13 = embed(&rbar_matrix(z1, params)?, 0, 2);
    let r23 = embed(&rbar_matrix(z2, params)?, 1, 2);
    let lhs = mul8(&mul8(&r12, &r13), &r23);
    let rhs = mul8(&mul8(&r23, &r13), &r12);
    Ok(lhs
        .iter()
        .flatten()
        .zip(rhs.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}
