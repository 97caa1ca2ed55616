//! Regularized Barnes products, the G-functions built from them, the
//! ζ-prefactors of the trace formula and the trace constant A.

use crate::contour_quadrature::rules;
use crate::error::{Error, Result};
use crate::special_core::{
    bernoulli_poly, expm1, gamma_fn, hurwitz_zeta, is_gamma_pole, log_gamma, principal_pow, real, relative_residual,
    DeformParams, PrecisionConfig,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// ∏_{k ≥ 0} ∏_m (a_m + k·ω) / ∏_p (b_p + k·ω) over an n-dimensional lattice
/// of periods, n ∈ {1, 2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarnesSpec {
    numerator_offsets: Vec<Complex64>,
    denominator_offsets: Vec<Complex64>,
    periods: Vec<Complex64>,
}

impl BarnesSpec {
    pub fn new(numerator_offsets: Vec<Complex64>, denominator_offsets: Vec<Complex64>, periods: Vec<Complex64>) -> Result<Self> {
        if periods.is_empty() || periods.len() > 2 {
            return Err(Error::Unsupported(format!("Barnes products of rank {} (only 1 and 2)", periods.len())));
        }
        if periods.iter().any(|w| w.norm() == 0.0 || !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::InvalidParameter("periods must be finite and nonzero".into()));
        }
        if periods.len() == 2 && (periods[0] / periods[1]).re <= 0.0 {
            return Err(Error::InvalidParameter("period ratio must have positive real part".into()));
        }
        if periods.len() == 1 && periods[0].re <= 0.0 {
            return Err(Error::InvalidParameter("period must have positive real part".into()));
        }
        Ok(Self { numerator_offsets, denominator_offsets, periods })
    }

    pub fn rank(&self) -> usize {
        self.periods.len()
    }

    pub fn numerator_offsets(&self) -> &[Complex64] {
        &self.numerator_offsets
    }

    pub fn denominator_offsets(&self) -> &[Complex64] {
        &self.denominator_offsets
    }

    pub fn periods(&self) -> &[Complex64] {
        &self.periods
    }

    /// Σ a^q − Σ b^q.
    pub fn moment(&self, q: u32) -> Complex64 {
        let sum = |v: &[Complex64]| v.iter().map(|x| x.powu(q)).sum::<Complex64>();
        sum(&self.numerator_offsets) - sum(&self.denominator_offsets)
    }

    /// The moments q = 0..=rank must balance for the product to converge.
    pub fn check_constraints(&self, abs_tol: f64) -> Result<()> {
        for q in 0..=self.rank() as u32 {
            let scale: f64 = self
                .numerator_offsets
                .iter()
                .chain(&self.denominator_offsets)
                .map(|x| x.norm().powi(q as i32))
                .sum::<f64>()
                .max(1.0);
            let mismatch = self.moment(q).norm();
            if mismatch > abs_tol.max(1e-13) * scale {
                return Err(Error::Constraint { q: q as usize, mismatch });
            }
        }
        Ok(())
    }

    /// Signed offsets: +1 for numerator, −1 for denominator.
    fn signed(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.numerator_offsets
            .iter()
            .map(|a| (1.0, *a))
            .chain(self.denominator_offsets.iter().map(|b| (-1.0, *b)))
    }
}

fn nonpositive_integer_index(z: Complex64) -> Option<i64> {
    if is_gamma_pole(z) {
        Some(-(z.re.round() as i64))
    } else {
        None
    }
}

fn rank_one_log(spec: &BarnesSpec) -> Result<Complex64> {
    let w = spec.periods[0];
    let max_c = spec.signed().map(|(_, a)| (a / w).norm()).fold(0.0, f64::max);
    let cutoff = (4.0 * max_c).ceil() as usize + 40;
    let mut total = Complex64::new(0.0, 0.0);
    for (s, a) in spec.signed() {
        if let Some(k) = nonpositive_integer_index(a / w) {
            return Err(Error::LatticeZero { point: vec![k] });
        }
        for k in 0..=cutoff {
            total += s * (a + w * k as f64).ln();
        }
    }
    // log(1 + a/kω) expanded; q = 1 cancels by the constraint
    let mut tail = Complex64::new(0.0, 0.0);
    for q in 2..=80u32 {
        let term = spec.moment(q) / w.powu(q) * (hurwitz_zeta(q, cutoff as f64 + 1.0) / q as f64);
        let term = if q % 2 == 0 { -term } else { term };
        tail += term;
        if term.norm() < 1e-18 * (1.0 + tail.norm()) && q > 4 {
            break;
        }
    }
    Ok(total + tail)
}

/// Γ-ratio form of the rank-one product: ∏ Γ(b/ω) / ∏ Γ(a/ω).
pub fn rank_one_closed_form(spec: &BarnesSpec) -> Result<Complex64> {
    if spec.rank() != 1 {
        return Err(Error::Unsupported("closed form exists for rank one only".into()));
    }
    let w = spec.periods[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, a) in spec.signed() {
        if let Some(k) = nonpositive_integer_index(a / w) {
            return Err(Error::LatticeZero { point: vec![k] });
        }
        acc -= s * log_gamma(a / w)?;
    }
    Ok(acc.exp())
}

fn rank_two_log(spec: &BarnesSpec) -> Result<Complex64> {
    let (w1, w2) = (spec.periods[0], spec.periods[1]);
    let ratio = w1 / w2;
    let max_c = spec.signed().map(|(_, a)| (a / w2).norm()).fold(0.0, f64::max);
    let cutoff = ((12.0 * (1.0 + max_c)) / ratio.norm()).ceil().min(50_000.0) as usize;
    let mut total = Complex64::new(0.0, 0.0);
    for k1 in 0..=cutoff {
        for (s, a) in spec.signed() {
            let arg = (a + w1 * k1 as f64) / w2;
            if let Some(k2) = nonpositive_integer_index(arg) {
                return Err(Error::LatticeZero { point: vec![k1 as i64, k2] });
            }
            // inner product over k2 closes to Γ(b/ω2)/Γ(a/ω2)
            total -= s * log_gamma(arg)?;
        }
    }
    // Stirling tail over k1 > cutoff; orders below 3 cancel by the constraints
    let inverse = ratio.inv();
    let mut tail = Complex64::new(0.0, 0.0);
    for k in 3..=22usize {
        let bsum: Complex64 = spec.signed().map(|(s, a)| -s * bernoulli_poly(k, a / w2)).sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = bsum * sign / (k * (k - 1)) as f64 * inverse.powu(k as u32 - 1)
            * hurwitz_zeta(k as u32 - 1, cutoff as f64 + 1.0);
        tail += term;
    }
    Ok(total + tail)
}

/// Logarithm of the truncated product plus its asymptotic tail.
pub fn log_barnes_product(spec: &BarnesSpec, precision: &PrecisionConfig) -> Result<Complex64> {
    spec.check_constraints(precision.abs_tol)?;
    match spec.rank() {
        1 => rank_one_log(spec),
        _ => rank_two_log(spec),
    }
}

pub fn barnes_product(spec: &BarnesSpec, precision: &PrecisionConfig) -> Result<Complex64> {
    Ok(log_barnes_product(spec, precision)?.exp())
}

/// Whether every offset has positive real part relative to the periods, the
/// condition for the exponential integral below.
pub fn integral_domain_ok(spec: &BarnesSpec) -> bool {
    let w = spec.periods.iter().map(|w| w.norm()).fold(f64::INFINITY, f64::min);
    spec.periods.iter().all(|p| p.re > 0.0) && spec.signed().all(|(_, a)| a.re > 1e-2 * w)
}

/// log P = −∫₀^∞ dt/t Σ s_i e^{−c_i t} / ∏_j (1 − e^{−ω_j t}).
pub fn log_barnes_integral(spec: &BarnesSpec, precision: &PrecisionConfig) -> Result<Complex64> {
    spec.check_constraints(precision.abs_tol)?;
    if !integral_domain_ok(spec) {
        return Err(Error::Domain(
            "exponential integral needs every offset to the right of the imaginary axis".into(),
        ));
    }
    // offsets shared by numerator and denominator cancel exactly
    let mut dens = spec.denominator_offsets.clone();
    let mut signed: Vec<(f64, Complex64)> = Vec::new();
    for a in &spec.numerator_offsets {
        match dens.iter().position(|b| b == a) {
            Some(k) => {
                dens.swap_remove(k);
            }
            None => signed.push((1.0, *a)),
        }
    }
    signed.extend(dens.into_iter().map(|b| (-1.0, b)));
    if signed.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let max_c = signed.iter().map(|(_, a)| a.norm()).fold(0.0, f64::max);
    let moments: Vec<Complex64> = (0..64u32).map(|q| signed.iter().map(|(s, a)| s * a.powu(q)).sum()).collect();
    let rank = spec.rank() as u32;
    let periods = spec.periods.clone();
    let kernel = move |t: f64| -> Complex64 {
        let numerator = if t * max_c < 2.0 {
            // moments up to q = rank vanish; start the series above them
            let mut acc = Complex64::new(0.0, 0.0);
            let mut coeff = 1.0;
            for (q, mu) in moments.iter().enumerate() {
                if q > 0 {
                    coeff *= -t / q as f64;
                }
                if q as u32 > rank {
                    acc += mu * coeff;
                }
            }
            acc
        } else {
            signed.iter().map(|(s, a)| s * (-a * t).exp()).sum()
        };
        let denominator: Complex64 = periods.iter().map(|w| -expm1(-w * t)).product();
        -numerator / denominator / t
    };
    let tol = precision.rel_tol.max(1e-13);
    let head = rules::tanh_sinh(&kernel, 0.0, 1.0, tol)?;
    let tail = rules::half_line(&kernel, 1.0, 0.5, tol, 4000)?;
    Ok(head + tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GKind {
    /// G of the type I factors
    Standard,
    /// G̃ of the type II factors
    Tilde,
    /// Ḡ of the mixed factors
    Bar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    Auto,
    Product,
    Integral,
}

/// Numerator and denominator shifts x of the factors (x − 2kħ − mγ).
pub fn g_offsets(kind: GKind, z: Complex64, hbar: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let h = real(hbar);
    let zero = real(0.0);
    match kind {
        GKind::Standard => (vec![-h, -3.0 * h, z - h, -z - h], vec![zero, -2.0 * h, z - 2.0 * h, -z - 2.0 * h]),
        GKind::Tilde => (vec![zero, -2.0 * h, z, -z], vec![-h, h, z - h, -z - h]),
        GKind::Bar => (vec![zero, z - h, -z - 2.0 * h], vec![-2.0 * h, z, -z - h]),
    }
}

/// The G-function as a rank-two Barnes product in m − 1 ≥ 0 and k ≥ 0
/// with periods (γ, 2ħ) and offsets γ − x.
pub fn g_spec(kind: GKind, z: Complex64, params: &DeformParams) -> Result<BarnesSpec> {
    let g = params.gamma();
    let (nums, dens) = g_offsets(kind, z, params.hbar());
    BarnesSpec::new(
        nums.into_iter().map(|x| g - x).collect(),
        dens.into_iter().map(|x| g - x).collect(),
        vec![g, real(2.0 * params.hbar())],
    )
}

/// Product and integral values of one G-function with their agreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualEvaluation {
    pub product: Complex64,
    pub integral: Complex64,
    pub residual: f64,
}

pub fn g_evaluate(kind: GKind, z: Complex64, params: &DeformParams, precision: &PrecisionConfig, route: Route) -> Result<Complex64> {
    let spec = g_spec(kind, z, params)?;
    match route {
        Route::Product => barnes_product(&spec, precision),
        Route::Integral => Ok(log_barnes_integral(&spec, precision)?.exp()),
        Route::Auto => {
            if integral_domain_ok(&spec) {
                if let Ok(v) = log_barnes_integral(&spec, precision) {
                    return Ok(v.exp());
                }
            }
            barnes_product(&spec, precision).map_err(|e| match e {
                Error::Nonconvergence(msg) => Error::Domain(format!("neither route converges: {msg}")),
                other => other,
            })
        }
    }
}

pub fn g_dual(kind: GKind, z: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<DualEvaluation> {
    let product = g_evaluate(kind, z, params, precision, Route::Product)?;
    let integral = g_evaluate(kind, z, params, precision, Route::Integral)?;
    Ok(DualEvaluation { product, integral, residual: relative_residual(product, integral) })
}

pub fn g_fn(alpha: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    g_evaluate(GKind::Standard, alpha, params, precision, Route::Auto)
}

pub fn g_tilde_fn(beta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    g_evaluate(GKind::Tilde, beta, params, precision, Route::Auto)
}

pub fn g_bar_fn(z: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    g_evaluate(GKind::Bar, z, params, precision, Route::Auto)
}

fn gamma_quotient_log(num: Complex64, den: Complex64) -> Result<Complex64> {
    if is_gamma_pole(num) {
        return Err(Error::Pole { location: num });
    }
    if is_gamma_pole(den) {
        return Err(Error::Zero { location: den });
    }
    Ok(log_gamma(num)? - log_gamma(den)?)
}

/// Γ(1+z/2ħ)/Γ(1/2+z/2ħ) · G(z)/G(0)^{1/2}.
pub fn zeta_fn(z: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let x = z / (2.0 * params.hbar());
    let ratio = gamma_quotient_log(1.0 + x, 0.5 + x);
    let g0 = g_fn(real(0.0), params, precision)?;
    match ratio {
        Ok(l) => Ok(l.exp() * g_fn(z, params, precision)? / principal_pow(g0, 0.5)),
        Err(Error::Zero { .. }) => Ok(real(0.0)),
        Err(e) => Err(e),
    }
}

/// Γ(1/2+β/2ħ)/Γ(β/2ħ) · G̃(β)/G̃(0)^{1/2}.
pub fn zeta_tilde_fn(beta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let x = beta / (2.0 * params.hbar());
    let ratio = gamma_quotient_log(0.5 + x, x);
    let g0 = g_tilde_fn(real(0.0), params, precision)?;
    match ratio {
        Ok(l) => Ok(l.exp() * g_tilde_fn(beta, params, precision)? / principal_pow(g0, 0.5)),
        Err(Error::Zero { .. }) => Ok(real(0.0)),
        Err(e) => Err(e),
    }
}

/// Γ(1/2+z/2ħ)/Γ(1+z/2ħ) · Ḡ(z).
pub fn zeta_bar_fn(z: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let x = z / (2.0 * params.hbar());
    let ratio = gamma_quotient_log(0.5 + x, 1.0 + x);
    match ratio {
        Ok(l) => Ok(l.exp() * g_bar_fn(z, params, precision)?),
        Err(Error::Zero { .. }) => Ok(real(0.0)),
        Err(e) => Err(e),
    }
}

/// Sizes of a trace: N type II points with n plus signs, M type I points
/// with m plus signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceShape {
    pub big_n: usize,
    pub big_m: usize,
    pub n: usize,
    pub m: usize,
}

impl TraceShape {
    pub fn new(big_n: usize, big_m: usize, n: usize, m: usize) -> Result<Self> {
        let lhs = big_n as i64 - big_m as i64;
        let rhs = 2 * (n as i64 - m as i64);
        if lhs != rhs || n > big_n || m > big_m {
            return Err(Error::Condition { big_n, big_m, n, m });
        }
        Ok(Self { big_n, big_m, n, m })
    }
}

/// The numerical constant in front of the general trace.
pub fn trace_constant_a(shape: TraceShape, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let TraceShape { big_n, big_m, n, m } = shape;
    let (nf, mf, bnf, bmf) = (n as f64, m as f64, big_n as f64, big_m as f64);
    let h = params.hbar();
    let g = params.gamma();
    let two_h = real(2.0 * h);
    let mut value = principal_pow(two_h / (PI.sqrt() * g), (bnf - bmf).powi(2) / 4.0);
    if (big_n * n + big_m * m) % 2 == 1 {
        value = -value;
    }
    value *= principal_pow(real(-h), nf + mf);
    value *= PI.powf(nf * mf + nf / 2.0 + mf / 2.0);
    if big_n > 0 {
        value *= principal_pow(g_tilde_fn(real(0.0), params, precision)?, bnf / 4.0);
    }
    if big_m > 0 {
        value *= principal_pow(g_fn(real(0.0), params, precision)?, bmf / 4.0);
    }
    value /= principal_pow(two_h, (bnf + bmf) / 4.0);
    value /= g.powf(2.0 * (nf + mf));
    let h_over_g = real(h) / g;
    let e1 = (bnf * bnf + 4.0 * nf) / 4.0;
    let e2 = (bmf * bmf + 4.0 * mf) / 4.0;
    if e1 != 0.0 {
        value /= principal_pow(gamma_fn(1.0 - h_over_g)?, e1);
    }
    if e2 != 0.0 {
        value /= principal_pow(gamma_fn(1.0 + h_over_g)?, e2);
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_core::{c64, sin_pi};
    use proptest::prelude::*;

    fn prec() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        relative_residual(a, b) < tol
    }

    #[test]
    fn rank_one_matches_gamma_ratio() {
        let spec = BarnesSpec::new(vec![real(0.3), real(0.7)], vec![real(0.2), real(0.8)], vec![real(1.0)]).unwrap();
        let expected = gamma_fn(real(0.2)).unwrap() * gamma_fn(real(0.8)).unwrap()
            / (gamma_fn(real(0.3)).unwrap() * gamma_fn(real(0.7)).unwrap());
        assert!(close(barnes_product(&spec, &prec()).unwrap(), expected, 1e-13));
        assert!(close(rank_one_closed_form(&spec).unwrap(), expected, 1e-14));
        assert!(close(log_barnes_integral(&spec, &prec()).unwrap().exp(), expected, 1e-12));
    }

    #[test]
    fn rank_one_reflection_value() {
        let spec = BarnesSpec::new(vec![real(0.5), real(0.5)], vec![real(0.25), real(0.75)], vec![real(1.0)]).unwrap();
        assert!(close(barnes_product(&spec, &prec()).unwrap(), real(2f64.sqrt()), 1e-13));
    }

    #[test]
    fn identical_offsets_give_one() {
        let a = vec![c64(0.3, 0.2), real(1.7), real(2.2)];
        let spec = BarnesSpec::new(a.clone(), a, vec![real(1.0), real(2.0)]).unwrap();
        assert!(close(barnes_product(&spec, &prec()).unwrap(), real(1.0), 1e-12));
    }

    #[test]
    fn constraints_enforced() {
        let spec = BarnesSpec::new(vec![real(0.3), real(0.8)], vec![real(0.2), real(0.8)], vec![real(1.0)]).unwrap();
        assert!(matches!(barnes_product(&spec, &prec()), Err(Error::Constraint { q: 1, .. })));
        let spec = BarnesSpec::new(vec![real(1.0)], vec![real(1.0), real(2.0)], vec![real(1.0)]).unwrap();
        assert!(matches!(barnes_product(&spec, &prec()), Err(Error::Constraint { q: 0, .. })));
    }

    #[test]
    fn lattice_zero_reported() {
        let spec = BarnesSpec::new(vec![real(-2.0), real(3.0)], vec![real(0.5), real(0.5)], vec![real(1.0)]).unwrap();
        assert!(matches!(barnes_product(&spec, &prec()), Err(Error::LatticeZero { point }) if point == vec![2]));
    }

    #[test]
    fn rank_two_product_matches_integral() {
        let nums = vec![real(1.1), real(2.5), c64(0.7, 0.3), c64(1.9, -0.3)];
        let sum: Complex64 = nums.iter().sum();
        let sq: Complex64 = nums.iter().map(|x| x * x).sum();
        // pick denominators with the same first three moments: a pair symmetric
        // around the mean with matching variance plus two fixed values
        let fixed = [real(1.3), real(2.0)];
        let rest_sum = sum - fixed[0] - fixed[1];
        let rest_sq = sq - fixed[0] * fixed[0] - fixed[1] * fixed[1];
        let mean = rest_sum / 2.0;
        let spread = (rest_sq / 2.0 - mean * mean).sqrt();
        let dens = vec![fixed[0], fixed[1], mean + spread, mean - spread];
        let spec = BarnesSpec::new(nums, dens, vec![c64(1.5, 0.2), real(2.0)]).unwrap();
        let p = barnes_product(&spec, &prec()).unwrap();
        let i = log_barnes_integral(&spec, &prec()).unwrap().exp();
        assert!(close(p, i, 1e-11), "{p} vs {i}");
    }

    #[test]
    fn normalizations() {
        let p = prec();
        for g in [1.5, 2.0, 3.0] {
            let params = DeformParams::real(1.0, g).unwrap();
            assert!(close(g_fn(real(1.0), &params, &p).unwrap(), real(1.0), 1e-12));
            assert!(close(g_tilde_fn(real(1.0), &params, &p).unwrap(), real(1.0), 1e-12));
            assert!(close(g_bar_fn(real(0.0), &params, &p).unwrap(), real(1.0), 1e-12));
        }
    }

    #[test]
    fn dual_routes_agree() {
        let p = prec();
        let params = DeformParams::real(1.0, 3.0).unwrap();
        let d = g_dual(GKind::Standard, real(0.5), &params, &p).unwrap();
        assert!(d.residual < 1e-11, "{d:?}");
        let params = DeformParams::real(1.0, 2.5).unwrap();
        let d = g_dual(GKind::Tilde, real(0.3), &params, &p).unwrap();
        assert!(d.residual < 1e-11, "{d:?}");
        let d = g_dual(GKind::Bar, c64(0.4, 0.2), &params, &p).unwrap();
        assert!(d.residual < 1e-11, "{d:?}");
    }

    #[test]
    fn bar_functional_equations() {
        let p = prec();
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let z = real(0.4);
        let a = g_bar_fn(z, &params, &p).unwrap();
        let expect = z * PI / 2.0 / sin_pi(z / 2.0);
        assert!(close(a * g_bar_fn(-z, &params, &p).unwrap(), expect, 1e-12));
        assert!(close(a * g_bar_fn(z - 1.0, &params, &p).unwrap(), expect, 1e-12));
        assert!(close(g_bar_fn(real(-1.0), &params, &p).unwrap(), real(1.0), 1e-12));
    }

    #[test]
    fn product_of_g_and_g_tilde() {
        // the double products give (ħ/z)·sin(πz/γ)/sin(πħ/γ)
        let p = prec();
        let params = DeformParams::real(1.0, 1.5).unwrap();
        let z = c64(0.35, 0.1);
        let lhs = g_fn(z, &params, &p).unwrap() * g_tilde_fn(z, &params, &p).unwrap();
        let rhs = sin_pi(z / 1.5) / (z * sin_pi(real(1.0 / 1.5)));
        assert!(close(lhs, rhs, 1e-11), "{lhs} vs {rhs}");
    }

    #[test]
    fn zeta_bar_at_origin() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        assert!(close(zeta_bar_fn(real(0.0), &params, &prec()).unwrap(), real(PI.sqrt()), 1e-12));
    }

    #[test]
    fn zeta_at_minus_hbar_vanishes() {
        // 1/Γ(1/2 + z/2ħ) has a simple zero at z = −ħ
        let params = DeformParams::real(1.0, 3.0).unwrap();
        let p = prec();
        assert_eq!(zeta_fn(real(-1.0), &params, &p).unwrap(), real(0.0));
        let eps = 1e-6;
        let slope = zeta_fn(real(-1.0 + eps), &params, &p).unwrap() / eps;
        let g0 = g_fn(real(0.0), &params, &p).unwrap();
        let expected = PI.sqrt() / 2.0 * g_fn(real(-1.0), &params, &p).unwrap() / g0.sqrt();
        assert!(close(slope, expected, 1e-5), "{slope} vs {expected}");
    }

    #[test]
    fn trace_constant_trivial_and_condition() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let one = trace_constant_a(TraceShape::new(0, 0, 0, 0).unwrap(), &params, &prec()).unwrap();
        assert!(close(one, real(1.0), 1e-15));
        assert!(matches!(TraceShape::new(2, 0, 0, 0), Err(Error::Condition { .. })));
        assert!(TraceShape::new(2, 0, 1, 0).is_ok());
    }

    #[test]
    fn g_at_zero_real_positive() {
        for g in [1.5, 2.0, 3.0] {
            let params = DeformParams::real(1.0, g).unwrap();
            let a = g_fn(real(0.0), &params, &prec()).unwrap();
            let b = g_tilde_fn(real(0.0), &params, &prec()).unwrap();
            assert!(a.re > 0.0 && a.im.abs() < 1e-14 && b.re > 0.0 && b.im.abs() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn g_functions_are_even(x in -0.9f64..0.9, y in -0.5f64..0.5, gi in 0usize..3) {
            let g = [1.5, 2.0, 3.0][gi];
            let params = DeformParams::real(1.0, g).unwrap();
            let z = c64(x, y);
            let p = prec();
            prop_assert!(close(g_fn(z, &params, &p).unwrap(), g_fn(-z, &params, &p).unwrap(), 1e-10));
            prop_assert!(close(g_tilde_fn(z, &params, &p).unwrap(), g_tilde_fn(-z, &params, &p).unwrap(), 1e-10));
        }

        #[test]
        fn rank_one_routes_agree(a in 0.1f64..3.0, b in 0.1f64..3.0, d in 0.1f64..3.0) {
            let e = a + b - d;
            prop_assume!(e > 0.1);
            let spec = BarnesSpec::new(vec![real(a), real(b)], vec![real(d), real(e)], vec![real(1.0)]).unwrap();
            let closed = rank_one_closed_form(&spec).unwrap();
            prop_assert!(close(barnes_product(&spec, &prec()).unwrap(), closed, 1e-12));
        }
    }
}
