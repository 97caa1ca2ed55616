//! Trace ratios of products of free-field exponentials over the Fock space,
//! as a double product over the lattice mγ + 2kħ and as an exponential
//! integral, plus the rules that rewrite μ₋ and φ₊ in terms of φ₋ and η₊.

use crate::contour_quadrature::rules;
use crate::error::{Error, Result};
use crate::special_core::{bernoulli_poly, digamma, expm1, hurwitz_zeta, is_gamma_pole, log_gamma, real, DeformParams, PrecisionConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    PhiMinus,
    PhiPlus,
    MuMinus,
    EtaPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldFactor {
    kind: FieldKind,
    argument: Complex64,
    power: i32,
}

impl FieldFactor {
    pub fn new(kind: FieldKind, argument: Complex64, power: i32) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidParameter("field power must be nonzero".into()));
        }
        Ok(Self { kind, argument, power })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn argument(&self) -> Complex64 {
        self.argument
    }

    pub fn power(&self) -> i32 {
        self.power
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorProduct {
    pub factors: Vec<FieldFactor>,
    pub prefactor: Complex64,
    /// Number of (−1)^p insertions; evaluated as +1 on the charge-zero sector.
    pub sign_exponent: i64,
}

impl OperatorProduct {
    pub fn new(factors: Vec<FieldFactor>) -> Self {
        Self { factors, prefactor: real(1.0), sign_exponent: 0 }
    }

    pub fn is_reduced(&self) -> bool {
        self.factors
            .iter()
            .all(|f| matches!(f.kind, FieldKind::PhiMinus | FieldKind::EtaPlus))
    }

    /// Concatenation, the product of two operators.
    pub fn concat(&self, other: &OperatorProduct) -> OperatorProduct {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().copied());
        OperatorProduct {
            factors,
            prefactor: self.prefactor * other.prefactor,
            sign_exponent: self.sign_exponent + other.sign_exponent,
        }
    }
}

/// Σ k_j over φ₋ factors and Σ p_k over η₊ factors both vanish.
pub fn check_neutrality(product: &OperatorProduct) -> Result<bool> {
    if !product.is_reduced() {
        return Err(Error::Unreduced);
    }
    let (phi, eta) = power_sums(product);
    Ok(phi == 0 && eta == 0)
}

fn power_sums(product: &OperatorProduct) -> (i64, i64) {
    let sum = |k: FieldKind| -> i64 {
        product
            .factors
            .iter()
            .filter(|f| f.kind == k)
            .map(|f| f.power as i64)
            .sum()
    };
    (sum(FieldKind::PhiMinus), sum(FieldKind::EtaPlus))
}

/// μ₋(u) → φ₋(u+ħ)φ₋(u); φ₊(z) → η₊(z)η₊(z−ħ) with one sign insertion.
pub fn reduce_product(product: &OperatorProduct, params: &DeformParams) -> OperatorProduct {
    let h = params.hbar();
    let mut out = OperatorProduct { factors: Vec::new(), prefactor: product.prefactor, sign_exponent: product.sign_exponent };
    for f in &product.factors {
        match f.kind {
            FieldKind::MuMinus => {
                out.factors.push(FieldFactor { kind: FieldKind::PhiMinus, argument: f.argument + h, power: f.power });
                out.factors.push(FieldFactor { kind: FieldKind::PhiMinus, argument: f.argument, power: f.power });
            }
            FieldKind::PhiPlus => {
                out.factors.push(FieldFactor { kind: FieldKind::EtaPlus, argument: f.argument, power: f.power });
                out.factors.push(FieldFactor { kind: FieldKind::EtaPlus, argument: f.argument - h, power: f.power });
                out.sign_exponent += f.power as i64;
            }
            _ => out.factors.push(*f),
        }
    }
    out
}

/// Separations δ = z_k − w_j with exponents k_j·p_k, in a canonical order so
/// that the result does not depend on the order of the factors.
fn pairs(product: &OperatorProduct) -> Vec<(Complex64, i64)> {
    let mut out = Vec::new();
    for eta in product.factors.iter().filter(|f| f.kind == FieldKind::EtaPlus) {
        for phi in product.factors.iter().filter(|f| f.kind == FieldKind::PhiMinus) {
            out.push((eta.argument - phi.argument, eta.power as i64 * phi.power as i64));
        }
    }
    out.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(Ordering::Equal)
            .then(a.0.im.partial_cmp(&b.0.im).unwrap_or(Ordering::Equal))
            .then(a.1.cmp(&b.1))
    });
    out
}

fn checked_product(product: &OperatorProduct) -> Result<()> {
    if !product.is_reduced() {
        return Err(Error::Unreduced);
    }
    let (phi_sum, eta_sum) = power_sums(product);
    if phi_sum != 0 || eta_sum != 0 {
        return Err(Error::Neutrality { phi_sum, eta_sum });
    }
    Ok(())
}

fn lattice_check(delta: Complex64, params: &DeformParams, m_max: usize) -> Result<()> {
    let h = params.hbar();
    let g = params.gamma();
    for m in 1..=m_max {
        for shift in [0.0, 0.5] {
            let a = (g * m as f64 - delta) / (2.0 * h) + shift;
            if is_gamma_pole(a) {
                let k = -(a.re.round() as i64);
                return Err(Error::LatticeZero { point: vec![m as i64, k] });
            }
        }
    }
    Ok(())
}

/// log of the regularized single-pair product with unit exponent:
/// Σ_m [f(a−d) − f(a) + d f′(a)], f(x) = lnΓ(x) − lnΓ(x+1/2),
/// a = mγ/2ħ, d = δ/2ħ. The subtracted terms cancel between pairs of a
/// neutral product.
pub fn pairwise_log_kernel(delta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let h = params.hbar();
    let ratio = params.gamma() / (2.0 * h);
    let d = delta / (2.0 * h);
    let cutoff = (12.0 * (2.0 + d.norm()) / ratio.norm()).ceil() as usize;
    let cutoff = cutoff.clamp(8, precision.product_truncation.max(8) * 50);
    lattice_check(delta, params, cutoff)?;
    let mut total = Complex64::new(0.0, 0.0);
    for m in 1..=cutoff {
        let a = ratio * m as f64;
        total += log_gamma(a - d)? - log_gamma(a - d + 0.5)? - log_gamma(a)? + log_gamma(a + 0.5)?
            + d * (digamma(a)? - digamma(a + 0.5)?);
    }
    // asymptotic tail over m > cutoff in powers of 1/(mγ/2ħ)
    let offsets = [(1.0, -d), (-1.0, 0.5 - d), (-1.0, real(0.0)), (1.0, real(0.5))];
    let inverse = ratio.inv();
    let mut tail = Complex64::new(0.0, 0.0);
    for k in 3..=22usize {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let stirling: Complex64 = offsets.iter().map(|(s, c)| *s * bernoulli_poly(k, *c)).sum::<Complex64>()
            * (sign / (k * (k - 1)) as f64);
        let digamma_part = d * (bernoulli_poly(k - 1, real(0.0)) - bernoulli_poly(k - 1, real(0.5)))
            * (sign / (k - 1) as f64);
        let coefficient = stirling + digamma_part;
        tail += coefficient * inverse.powu(k as u32 - 1) * hurwitz_zeta(k as u32 - 1, cutoff as f64 + 1.0);
    }
    Ok(total + tail)
}

/// Contribution of one (φ₋, η₊) pair at separation δ with exponent k·p.
pub fn pairwise_kernel(delta: Complex64, kexp: i32, pexp: i32, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let e = kexp as i64 * pexp as i64;
    if e == 0 {
        return Ok(real(1.0));
    }
    Ok((pairwise_log_kernel(delta, params, precision)? * e as f64).exp())
}

/// e^y − 1 − y without cancellation.
fn expm1_minus_linear(y: Complex64) -> Complex64 {
    if y.norm() < 0.1 {
        let mut term = y * y / 2.0;
        let mut acc = term;
        for n in 3..20 {
            term *= y / n as f64;
            acc += term;
        }
        acc
    } else {
        expm1(y) - y
    }
}

/// ∫₀^∞ dx/x Σ e·(e^{δx/ħ} − 1 − δx/ħ) e^{−γx/ħ} / ((1 − e^{−γx/ħ})(1 + e^{−x})).
fn log_integral(pairs: &[(Complex64, i64)], params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    if pairs.is_empty() {
        return Ok(real(0.0));
    }
    let h = params.hbar();
    let g = params.gamma();
    for (delta, _) in pairs {
        if delta.re >= g.re - 1e-2 * h {
            return Err(Error::Domain(format!(
                "exponential integral needs Re δ < Re γ (δ = {delta}, γ = {g})"
            )));
        }
    }
    let integrand = |x: f64| -> Complex64 {
        let weight = (-g * x / h).exp() / (-expm1(-g * x / h) * (1.0 + (-x).exp()));
        let sum: Complex64 = pairs
            .iter()
            .map(|(delta, e)| *e as f64 * expm1_minus_linear(delta * x / h))
            .sum();
        sum * weight / x
    };
    let tol = precision.rel_tol.max(1e-13);
    let head = rules::tanh_sinh(&integrand, 0.0, 1.0, tol)?;
    let tail = rules::half_line(&integrand, 1.0, 0.5, tol, 4000)?;
    Ok(head + tail)
}

pub fn pairwise_kernel_integral(delta: Complex64, kexp: i32, pexp: i32, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let e = kexp as i64 * pexp as i64;
    if e == 0 {
        return Ok(real(1.0));
    }
    Ok(log_integral(&[(delta, e)], params, precision)?.exp())
}

pub fn trace_ratio_product(product: &OperatorProduct, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    checked_product(product)?;
    let mut log = Complex64::new(0.0, 0.0);
    for (delta, e) in pairs(product) {
        if e != 0 {
            log += pairwise_log_kernel(delta, params, precision)? * e as f64;
        }
    }
    Ok(product.prefactor * log.exp())
}

pub fn trace_ratio_integral(product: &OperatorProduct, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    checked_product(product)?;
    let pairs: Vec<(Complex64, i64)> = pairs(product).into_iter().filter(|(_, e)| *e != 0).collect();
    Ok(product.prefactor * log_integral(&pairs, params, precision)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_core::{c64, relative_residual};
    use proptest::prelude::*;

    fn prec() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn phi(w: Complex64, k: i32) -> FieldFactor {
        FieldFactor::new(FieldKind::PhiMinus, w, k).unwrap()
    }

    fn eta(z: Complex64, p: i32) -> FieldFactor {
        FieldFactor::new(FieldKind::EtaPlus, z, p).unwrap()
    }

    #[test]
    fn neutrality_examples() {
        let a = OperatorProduct::new(vec![phi(real(0.1), 1), phi(real(0.4), -1)]);
        assert!(check_neutrality(&a).unwrap());
        assert!(!check_neutrality(&OperatorProduct::new(vec![eta(real(0.2), 1)])).unwrap());
        assert!(!check_neutrality(&OperatorProduct::new(vec![phi(real(0.1), 2), phi(real(0.4), -1)])).unwrap());
        let mu = OperatorProduct::new(vec![FieldFactor::new(FieldKind::MuMinus, real(0.0), 1).unwrap()]);
        assert_eq!(check_neutrality(&mu), Err(Error::Unreduced));
        assert!(FieldFactor::new(FieldKind::EtaPlus, real(0.0), 0).is_err());
    }

    #[test]
    fn reduction_rules() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let mu = OperatorProduct::new(vec![FieldFactor::new(FieldKind::MuMinus, real(0.3), 1).unwrap()]);
        let r = reduce_product(&mu, &params);
        assert_eq!(r.factors, vec![phi(real(1.3), 1), phi(real(0.3), 1)]);
        assert_eq!(r.sign_exponent, 0);
        let pp = OperatorProduct::new(vec![FieldFactor::new(FieldKind::PhiPlus, real(0.3), 1).unwrap()]);
        let r = reduce_product(&pp, &params);
        assert_eq!(r.factors, vec![eta(real(0.3), 1), eta(real(-0.7), 1)]);
        assert_eq!(r.sign_exponent, 1);
        let plain = OperatorProduct::new(vec![phi(real(0.1), 1), eta(real(0.2), -1)]);
        assert_eq!(reduce_product(&plain, &params), plain);
        assert_eq!(reduce_product(&r, &params), r);
    }

    #[test]
    fn trivial_traces() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let p = prec();
        let empty = OperatorProduct::new(vec![]);
        assert_eq!(trace_ratio_product(&empty, &params, &p).unwrap(), real(1.0));
        assert_eq!(trace_ratio_integral(&empty, &params, &p).unwrap(), real(1.0));
        let w = real(0.3);
        let z = real(0.8);
        let cancel = OperatorProduct::new(vec![phi(w, 1), phi(w, -1), eta(z, 1), eta(z, -1)]);
        assert!((trace_ratio_product(&cancel, &params, &p).unwrap() - 1.0).norm() < 1e-14);
        assert!(matches!(
            trace_ratio_product(&OperatorProduct::new(vec![eta(z, 1)]), &params, &p),
            Err(Error::Neutrality { .. })
        ));
    }

    #[test]
    fn single_pair_routes_agree() {
        let p = prec();
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let a = pairwise_kernel(real(0.5), 1, 1, &params, &p).unwrap();
        let b = pairwise_kernel_integral(real(0.5), 1, 1, &params, &p).unwrap();
        assert!(relative_residual(a, b) < 1e-12, "{a} vs {b}");
        let params = DeformParams::real(1.0, 3.0).unwrap();
        let a = pairwise_kernel(real(-0.3), 1, 1, &params, &p).unwrap();
        let b = pairwise_kernel_integral(real(-0.3), 1, 1, &params, &p).unwrap();
        assert!(relative_residual(a, b) < 1e-12, "{a} vs {b}");
        assert_eq!(pairwise_kernel(real(0.5), 0, 3, &params, &p).unwrap(), real(1.0));
        let cube = pairwise_kernel(real(0.5), 1, 3, &params, &p).unwrap();
        assert!(relative_residual(cube, pairwise_kernel(real(0.5), 1, 1, &params, &p).unwrap().powu(3)) < 1e-13);
    }

    #[test]
    fn neutral_product_matches_bare_lattice_product() {
        // the unregularized double product, truncated, for two φ₋ and two η₊
        let params = DeformParams::real(0.7, 1.9).unwrap();
        let (h, g) = (0.7, 1.9);
        let w = [real(0.1), c64(-0.2, 0.1)];
        let z = [real(0.4), c64(0.3, -0.2)];
        let product = OperatorProduct::new(vec![phi(w[0], 1), phi(w[1], -1), eta(z[0], 1), eta(z[1], -1)]);
        let engine = trace_ratio_product(&product, &params, &prec()).unwrap();
        let mut log = Complex64::new(0.0, 0.0);
        let exps = [[1.0, -1.0], [-1.0, 1.0]];
        for m in 1..=600 {
            for k in 0..=600 {
                let shift = m as f64 * g + 2.0 * k as f64 * h;
                for (i, zi) in z.iter().enumerate() {
                    for (j, wj) in w.iter().enumerate() {
                        let d = zi - wj;
                        log += exps[i][j] * ((d - h - shift) / (d - shift)).ln();
                    }
                }
            }
        }
        assert!(relative_residual(engine, log.exp()) < 1e-4, "{engine} vs {}", log.exp());
    }

    #[test]
    fn lattice_zero_detected() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        assert!(matches!(pairwise_kernel(real(2.0), 1, 1, &params, &prec()), Err(Error::LatticeZero { .. })));
        assert!(matches!(pairwise_kernel(real(5.0), 1, 1, &params, &prec()), Err(Error::LatticeZero { .. })));
    }

    fn random_product(seed: &[f64]) -> OperatorProduct {
        OperatorProduct::new(vec![
            phi(c64(seed[0], seed[1]), 1),
            phi(c64(seed[2], 0.0), -2),
            phi(c64(seed[3], 0.1), 1),
            eta(c64(seed[4], seed[5]), 1),
            eta(c64(seed[6], 0.0), -1),
        ])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn routes_agree_on_neutral_products(seed in proptest::collection::vec(-0.4f64..0.4, 7)) {
            let params = DeformParams::real(1.0, 2.5).unwrap();
            let product = random_product(&seed);
            let a = trace_ratio_product(&product, &params, &prec()).unwrap();
            let b = trace_ratio_integral(&product, &params, &prec()).unwrap();
            prop_assert!(relative_residual(a, b) < 1e-10);
        }

        #[test]
        fn multiplicative_and_order_free(seed in proptest::collection::vec(-0.4f64..0.4, 7)) {
            let params = DeformParams::real(1.0, 2.0).unwrap();
            let p = prec();
            let a = random_product(&seed);
            let b = OperatorProduct::new(vec![phi(real(seed[0]), 1), phi(real(seed[1]), -1), eta(real(0.2), 1), eta(real(-0.1), -1)]);
            let whole = trace_ratio_product(&a.concat(&b), &params, &p).unwrap();
            // pairs across a and b cancel only after summation over both, so
            // compare with the cross-term-free split
            let ta = trace_ratio_product(&a, &params, &p).unwrap();
            let tb = trace_ratio_product(&b, &params, &p).unwrap();
            let mut cross = OperatorProduct::new(vec![]);
            cross.factors.extend(a.factors.iter().filter(|f| f.kind() == FieldKind::PhiMinus));
            cross.factors.extend(b.factors.iter().filter(|f| f.kind() == FieldKind::EtaPlus));
            let mut cross2 = OperatorProduct::new(vec![]);
            cross2.factors.extend(b.factors.iter().filter(|f| f.kind() == FieldKind::PhiMinus));
            cross2.factors.extend(a.factors.iter().filter(|f| f.kind() == FieldKind::EtaPlus));
            let tc = trace_ratio_product(&cross, &params, &p).unwrap() * trace_ratio_product(&cross2, &params, &p).unwrap();
            prop_assert!(relative_residual(whole, ta * tb * tc) < 1e-12);
            let mut reversed = a.clone();
            reversed.factors.reverse();
            prop_assert_eq!(trace_ratio_product(&a, &params, &p).unwrap(), trace_ratio_product(&reversed, &params, &p).unwrap());
        }
    }
}
