//! Deformed period integrals built on φ(v) = Γ(−v/2ħ)Γ(1/2 + v/2ħ): the
//! total-difference identities, the difference (Gauss–Manin type) system they
//! imply, the classical elliptic shadows, and the γ = 2ħ mixed traces that use
//! them.

use crate::barnes_functions::{g_fn, trace_constant_a, zeta_tilde_fn, TraceShape};
use crate::contour_quadrature::{
    extrapolate_to_zero, integrate_vertical, residue_at, rules, Excision, Ladder, Orientation, PoleBook, VerticalLine,
};
use crate::error::{Error, Result};
use crate::special_core::{
    cos_pi, is_gamma_pole, ln_cos_pi, ln_sin_pi, log_gamma, real, relative_residual, sin_pi, DeformParams,
    PrecisionConfig,
};
use crate::trace_evaluators::{
    general_trace, poly_p_tilde, trace_prefactor, type_ii_contour, ContourOptions, Sign, TraceSpec,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// φ(v) = Γ(−v/2ħ) Γ(1/2 + v/2ħ).
pub fn varphi(v: Complex64, hbar: f64) -> Result<Complex64> {
    let x = v / (2.0 * hbar);
    if is_gamma_pole(-x) || is_gamma_pole(0.5 + x) {
        return Err(Error::Pole { location: v });
    }
    Ok((log_gamma(-x)? + log_gamma(0.5 + x)?).exp())
}

fn varphi_or_nan(v: Complex64, hbar: f64) -> Complex64 {
    varphi(v, hbar).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

fn phi_product(v: Complex64, beta: &[Complex64], hbar: f64) -> Complex64 {
    beta.iter().map(|b| varphi_or_nan(v - b, hbar)).product()
}

fn check_distinct(beta: &[Complex64]) -> Result<()> {
    for i in 0..beta.len() {
        for j in (i + 1)..beta.len() {
            if (beta[i] - beta[j]).norm() < 1e-12 {
                return Err(Error::InvalidParameter(format!("coincident points β{} = β{}", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// The line C′ in the gap (max Re β − ħ, min Re β): β + 2ħr on the right,
/// β − ħ − 2ħr on the left.
pub fn c_prime_line(beta: &[Complex64], hbar: f64, options: &ContourOptions, terms: usize) -> Result<VerticalLine> {
    let lo = beta.iter().map(|b| b.re - hbar).fold(f64::NEG_INFINITY, f64::max);
    let hi = beta.iter().map(|b| b.re).fold(f64::INFINITY, f64::min);
    if lo >= hi {
        return Err(Error::ContourConstruction(format!(
            "points spread by ħ or more: no line between Re = {lo} and Re = {hi}"
        )));
    }
    let x = lo + options.gap_fraction.clamp(0.05, 0.95) * (hi - lo);
    let book = PoleBook::new(
        beta.iter().map(|b| Ladder::new(*b, real(2.0 * hbar))).collect(),
        beta.iter().map(|b| Ladder::new(b - hbar, real(-2.0 * hbar))).collect(),
    );
    VerticalLine::new(x, Orientation::Down, &book, terms)
}

/// v^p ∏φ(v − βⱼ) e^{ikπv/2ħ} integrated over C′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSpec {
    p: u8,
    k: Sign,
    beta: [Complex64; 3],
}

impl PeriodSpec {
    pub fn new(p: u8, k: Sign, beta: [Complex64; 3]) -> Result<Self> {
        if p > 1 {
            return Err(Error::InvalidParameter(format!("p must be 0 or 1, got {p}")));
        }
        check_distinct(&beta)?;
        Ok(Self { p, k, beta })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn k(&self) -> Sign {
        self.k
    }

    pub fn beta(&self) -> [Complex64; 3] {
        self.beta
    }
}

fn exp_phase(v: Complex64, k: f64, period: f64) -> Complex64 {
    (I * k * PI * v / period).exp()
}

pub fn f_period(spec: &PeriodSpec, hbar: f64, precision: &PrecisionConfig) -> Result<Complex64> {
    f_period_with(spec, hbar, precision, &ContourOptions::default())
}

pub fn f_period_with(spec: &PeriodSpec, hbar: f64, precision: &PrecisionConfig, options: &ContourOptions) -> Result<Complex64> {
    let line = c_prime_line(&spec.beta, hbar, options, precision.max_ladder_terms)?;
    let k = spec.k.value();
    let p = spec.p as i32;
    let f = |v: Complex64| v.powi(p) * phi_product(v, &spec.beta, hbar) * exp_phase(v, k, 2.0 * hbar);
    Ok(integrate_vertical(&f, &line, precision)?.value)
}

/// The period at (β₁, β₂, β₃ + 2ħ), continued from the C′ of (β₁, β₂, β₃):
/// the pole at β₃ + ħ has crossed to the right of the line and is removed.
pub fn f_period_shifted(spec: &PeriodSpec, hbar: f64, precision: &PrecisionConfig) -> Result<Complex64> {
    let line = c_prime_line(&spec.beta, hbar, &ContourOptions::default(), precision.max_ladder_terms)?;
    let k = spec.k.value();
    let p = spec.p as i32;
    let [b1, b2, b3] = spec.beta;
    let shifted = [b1, b2, b3 + 2.0 * hbar];
    let f = |v: Complex64| v.powi(p) * phi_product(v, &shifted, hbar) * exp_phase(v, k, 2.0 * hbar);
    let crossing = b3 + hbar;
    let radius = 0.5 * (crossing.re - line.real_part()).abs().min(0.5 * hbar);
    Ok(integrate_vertical(&f, &line, precision)?.value - residue_at(&f, crossing, radius, precision)?)
}

/// Two sides of a total-difference identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Self { lhs, rhs, residual: relative_residual(lhs, rhs) }
    }
}

/// ∏_{j≠m}(β_m+ħ−βⱼ) ∫_C̃ ∏φ(v−βⱼ) e^{±iπv/2ħ}/(v−β_m−ħ) against
/// ∫_C′ ∏φ(v−βⱼ) (v−β_m) e^{±iπv/2ħ}; `m` is 1-based.
pub fn total_difference_identity(
    m: usize,
    sign: Sign,
    beta: [Complex64; 3],
    hbar: f64,
    precision: &PrecisionConfig,
    options: &ContourOptions,
) -> Result<IdentityCheck> {
    if !(1..=3).contains(&m) {
        return Err(Error::InvalidParameter(format!("m must be 1, 2 or 3, got {m}")));
    }
    check_distinct(&beta)?;
    let line = c_prime_line(&beta, hbar, options, precision.max_ladder_terms)?;
    let bm = beta[m - 1];
    let k = sign.value();
    let scale: Complex64 = beta.iter().enumerate().filter(|(j, _)| *j != m - 1).map(|(_, b)| bm + hbar - b).product();
    let kernel_left = |v: Complex64| phi_product(v, &beta, hbar) * exp_phase(v, k, 2.0 * hbar) / (v - bm - hbar);
    let kernel_right = |v: Complex64| phi_product(v, &beta, hbar) * exp_phase(v, k, 2.0 * hbar) * (v - bm);
    let pole = bm + hbar;
    let radius = 0.5 * (pole.re - line.real_part()).abs().min(0.5 * hbar);
    let lhs = scale * (integrate_vertical(&kernel_left, &line, precision)?.value - residue_at(&kernel_left, pole, radius, precision)?);
    let rhs = integrate_vertical(&kernel_right, &line, precision)?.value;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// 2×2 connection matrix of the difference system in β₃ → β₃ + 2ħ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionMatrix(pub [[Complex64; 2]; 2]);

impl ConnectionMatrix {
    pub fn apply(&self, f: [Complex64; 2]) -> [Complex64; 2] {
        let a = &self.0;
        [a[0][0] * f[0] + a[0][1] * f[1], a[1][0] * f[0] + a[1][1] * f[1]]
    }

    pub fn determinant(&self) -> Complex64 {
        let a = &self.0;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }
}

fn base_matrix(hbar: f64) -> [[Complex64; 2]; 2] {
    [[real(1.0), real(0.0)], [real(hbar), real(1.0)]]
}

fn with_correction(hbar: f64, corr: [[Complex64; 2]; 2]) -> ConnectionMatrix {
    let b = base_matrix(hbar);
    ConnectionMatrix([[b[0][0] + corr[0][0], b[0][1] + corr[0][1]], [b[1][0] + corr[1][0], b[1][1] + corr[1][1]]])
}

fn connection_denominator(beta: [Complex64; 3], hbar: f64) -> Complex64 {
    (beta[2] + hbar - beta[0]) * (beta[2] + hbar - beta[1])
}

/// The correction term as printed: (ħ/D)·[[β₃, 1], [β₃(β₃+ħ), β₃+ħ]].
pub fn gm_correction_printed(beta: [Complex64; 3], hbar: f64) -> [[Complex64; 2]; 2] {
    let b3 = beta[2];
    let s = hbar / connection_denominator(beta, hbar);
    [[s * b3, s], [s * b3 * (b3 + hbar), s * (b3 + hbar)]]
}

/// The correction obtained from the total-difference identity:
/// (ħ/D)·(1, β₃+ħ)ᵀ(−β₃, 1).
pub fn gm_correction_derived(beta: [Complex64; 3], hbar: f64) -> [[Complex64; 2]; 2] {
    let b3 = beta[2];
    let s = hbar / connection_denominator(beta, hbar);
    [[-s * b3, s], [-s * b3 * (b3 + hbar), s * (b3 + hbar)]]
}

pub fn gm_connection_printed(beta: [Complex64; 3], hbar: f64) -> ConnectionMatrix {
    with_correction(hbar, gm_correction_printed(beta, hbar))
}

pub fn gm_connection(beta: [Complex64; 3], hbar: f64) -> ConnectionMatrix {
    with_correction(hbar, gm_correction_derived(beta, hbar))
}

/// |F_p(β₃ + 2ħ) + Σ_r A_pr F_r(β₃)| relative to max |F|, both rows.
pub fn gm_residual(
    beta: [Complex64; 3],
    k: Sign,
    hbar: f64,
    matrix: &ConnectionMatrix,
    precision: &PrecisionConfig,
) -> Result<[f64; 2]> {
    let mut here = [real(0.0); 2];
    let mut there = [real(0.0); 2];
    for p in 0..2u8 {
        let spec = PeriodSpec::new(p, k, beta)?;
        here[p as usize] = f_period(&spec, hbar, precision)?;
        there[p as usize] = f_period_shifted(&spec, hbar, precision)?;
    }
    let scale = here.iter().chain(there.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let applied = matrix.apply(here);
    Ok([(there[0] + applied[0]).norm() / scale, (there[1] + applied[1]).norm() / scale])
}

/// B₂ = exp(Σ iπβⱼ/2ħ) Σ exp(−iπβⱼ/2ħ).
pub fn third_point_coefficient(beta: [Complex64; 3], hbar: f64) -> Complex64 {
    let sum: Complex64 = beta.iter().sum();
    exp_phase(sum, 1.0, 2.0 * hbar) * beta.iter().map(|b| exp_phase(*b, -1.0, 2.0 * hbar)).sum::<Complex64>()
}

/// The two C′ moments ∫∏φ (v−β₃) e^{±iπv/2ħ}.
pub fn third_point_moments(beta: [Complex64; 3], hbar: f64, precision: &PrecisionConfig) -> Result<(Complex64, Complex64)> {
    let line = c_prime_line(&beta, hbar, &ContourOptions::default(), precision.max_ladder_terms)?;
    let b3 = beta[2];
    let plus = |v: Complex64| phi_product(v, &beta, hbar) * (v - b3) * exp_phase(v, 1.0, 2.0 * hbar);
    let minus = |v: Complex64| phi_product(v, &beta, hbar) * (v - b3) * exp_phase(v, -1.0, 2.0 * hbar);
    Ok((integrate_vertical(&plus, &line, precision)?.value, integrate_vertical(&minus, &line, precision)?.value))
}

/// |a + c·B₂·b| / max(|a|, |c·B₂·b|) for the two moments above; `b2_scale`
/// is c (1 for the identity itself).
pub fn third_point_relation_residual(beta: [Complex64; 3], hbar: f64, b2_scale: f64, precision: &PrecisionConfig) -> Result<f64> {
    check_distinct(&beta)?;
    let (a, b) = third_point_moments(beta, hbar, precision)?;
    let second = third_point_coefficient(beta, hbar) * b2_scale * b;
    Ok((a + second).norm() / a.norm().max(second.norm()))
}

/// Which quadratic kernel to use in the four-point identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadraticKernel {
    /// 2v² − v(2ħ − Σβ) + β₄(β₁+β₂+β₃−β₄−2ħ)
    Printed,
    /// 2v² + v(2ħ − Σβ) + β₄(β₁+β₂+β₃−β₄−2ħ)
    Derived,
    /// Printed with the linear coefficient scaled by (1 + δ).
    PerturbedLinear(f64),
}

pub fn quadratic_kernel(kind: QuadraticKernel, v: Complex64, beta: [Complex64; 4], hbar: f64) -> Complex64 {
    let sum: Complex64 = beta.iter().sum();
    let linear = match kind {
        QuadraticKernel::Printed => -(2.0 * hbar - sum),
        QuadraticKernel::Derived => 2.0 * hbar - sum,
        QuadraticKernel::PerturbedLinear(d) => -(2.0 * hbar - sum) * (1.0 + d),
    };
    2.0 * v * v + linear * v + beta[3] * (beta[0] + beta[1] + beta[2] - beta[3] - 2.0 * hbar)
}

/// ∫_C̃ ∏φ e^{±iπv/ħ}/(v−β₄−ħ) against (1/∏_{j≠4}(β₄−βⱼ+ħ)) ∫_C′ d(v,β) ∏φ e^{±iπv/ħ}.
pub fn gm_identity_n2(
    beta: [Complex64; 4],
    sign: Sign,
    hbar: f64,
    kernel: QuadraticKernel,
    precision: &PrecisionConfig,
) -> Result<IdentityCheck> {
    check_distinct(&beta)?;
    let line = c_prime_line(&beta, hbar, &ContourOptions::default(), precision.max_ladder_terms)?;
    let k = sign.value();
    let b4 = beta[3];
    let left = |v: Complex64| phi_product(v, &beta, hbar) * exp_phase(v, k, hbar) / (v - b4 - hbar);
    let right = |v: Complex64| quadratic_kernel(kernel, v, beta, hbar) * phi_product(v, &beta, hbar) * exp_phase(v, k, hbar);
    let pole = b4 + hbar;
    let radius = 0.5 * (pole.re - line.real_part()).abs().min(0.5 * hbar);
    let lhs = integrate_vertical(&left, &line, precision)?.value - residue_at(&left, pole, radius, precision)?;
    let denom: Complex64 = beta[..3].iter().map(|b| b4 - b + hbar).product();
    let rhs = integrate_vertical(&right, &line, precision)?.value / denom;
    Ok(IdentityCheck::new(lhs, rhs))
}

/// Real segment of an elliptic period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    /// (β₁, β₂)
    Lower,
    /// (β₂, β₃)
    Upper,
}

fn check_sorted(beta: [f64; 3]) -> Result<()> {
    if beta[0] < beta[1] && beta[1] < beta[2] && beta.iter().all(|b| b.is_finite()) {
        Ok(())
    } else {
        Err(Error::Ordering)
    }
}

/// ∫ g(v) dv/√|∏(v−βⱼ)| over a segment with v = a + (b−a)sin²θ, which
/// turns the endpoint singularities into 2dθ/√|v − c|.
fn desingularized<G>(g: &G, beta: [f64; 3], segment: Segment, precision: &PrecisionConfig) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (a, b, c) = match segment {
        Segment::Lower => (beta[0], beta[1], beta[2]),
        Segment::Upper => (beta[1], beta[2], beta[0]),
    };
    let f = |theta: f64| {
        let s = theta.sin();
        let v = a + (b - a) * s * s;
        real(2.0 * g(v) / (v - c).abs().sqrt())
    };
    Ok(rules::tanh_sinh(&f, 0.0, 0.5 * PI, precision.rel_tol * 1e-2)?.re)
}

/// ∫ v^p dv/√|∏(v−βⱼ)| over the chosen segment.
pub fn elliptic_period(p: u8, beta: [f64; 3], segment: Segment, precision: &PrecisionConfig) -> Result<f64> {
    check_sorted(beta)?;
    if p > 1 {
        return Err(Error::InvalidParameter(format!("p must be 0 or 1, got {p}")));
    }
    desingularized(&|v: f64| v.powi(p as i32), beta, segment, precision)
}

/// Relative residual of
/// (β₃−β₁)(β₃−β₂) ∫ dv/(√∏ (v−β₃)) = ∫ (v−β₃) dv/√∏ over (β₁, β₂).
pub fn classical_identity_residual(beta: [f64; 3], precision: &PrecisionConfig) -> Result<f64> {
    check_sorted(beta)?;
    let b3 = beta[2];
    let lhs = (b3 - beta[0]) * (b3 - beta[1]) * desingularized(&|v: f64| 1.0 / (v - b3), beta, Segment::Lower, precision)?;
    let rhs = desingularized(&|v: f64| v - b3, beta, Segment::Lower, precision)?;
    Ok((lhs - rhs).abs() / rhs.abs())
}

/// Mixed trace with three type II points (−,−,+) and one type I point at
/// γ = 2ħ, against the closed form of its extremal component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedTraceThree {
    pub numeric: Complex64,
    pub closed_form: Complex64,
    pub residual: f64,
    /// Residual of the intermediate reduction of the C̃ integral to the two
    /// C′ moments via the total-difference identity.
    pub reduction_residual: f64,
    pub contour: String,
}

/// ∏ sin(π(ζ−βⱼ)/4ħ) + i ∏ cos(π(ζ−βⱼ)/4ħ).
pub fn mixed_bracket(zeta: Complex64, beta: [Complex64; 3], hbar: f64) -> Complex64 {
    let args: Vec<Complex64> = beta.iter().map(|b| (zeta - b) / (4.0 * hbar)).collect();
    args.iter().map(|x| sin_pi(*x)).product::<Complex64>() + I * args.iter().map(|x| cos_pi(*x)).product::<Complex64>()
}

pub fn trace_mixed_1_3(
    beta: [Complex64; 3],
    zeta: Complex64,
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<MixedTraceThree> {
    if !params.is_free_point() {
        return Err(Error::InvalidParameter("the mixed trace is taken at γ = 2ħ".into()));
    }
    check_distinct(&beta)?;
    let h = params.hbar();
    let spec = TraceSpec::new(
        vec![(beta[0], Sign::Minus), (beta[1], Sign::Minus), (beta[2], Sign::Plus)],
        vec![(zeta, Sign::Minus)],
        *params,
    )?;
    let ev = general_trace(&spec, precision)?;
    let prefactor = trace_prefactor(&spec, precision)?;
    let (a, b) = third_point_moments(beta, h, precision)?;
    let d = connection_denominator(beta, h);
    let sum: Complex64 = beta.iter().sum();
    let closed_integral = 4.0 * h / d * exp_phase(3.0 * zeta + sum, 1.0, 4.0 * h) * mixed_bracket(zeta, beta, h) * b;
    let closed_form = prefactor * closed_integral;
    let reduced = 2.0 * h / d / (2.0 * I) * (exp_phase(zeta, -1.0, 2.0 * h) * a - exp_phase(zeta, 1.0, 2.0 * h) * b);
    Ok(MixedTraceThree {
        numeric: ev.value,
        closed_form,
        residual: relative_residual(ev.value, closed_form),
        reduction_residual: relative_residual(ev.integral, reduced),
        contour: ev.contour,
    })
}

/// Exact value of ∫_C du/2πi ∏ⱼ sin(π(u−βⱼ)/2ħ) / ∏ₗ sin(π(u−aₗ)/ħ) on a
/// downward line with aₗ + rħ (r ≥ 1) on the right: the integrand is
/// 2ħ-periodic up to sign, so it reduces to the residues in one strip.
pub fn u_integral_exact(a: &[Complex64], beta: &[Complex64], hbar: f64) -> Complex64 {
    let mut total = real(0.0);
    for (i, ai) in a.iter().enumerate() {
        for r in 1..=2 {
            let p = ai + r as f64 * hbar;
            let num: Complex64 = beta.iter().map(|b| sin_pi((p - b) / (2.0 * hbar))).product();
            let den: Complex64 = a.iter().enumerate().filter(|(l, _)| *l != i).map(|(_, al)| sin_pi((p - al) / hbar)).product();
            total += p * num * (if r == 1 { -1.0 } else { 1.0 }) * hbar / (PI * den);
        }
    }
    -total / (2.0 * hbar)
}

/// The same u-integral by line quadrature.
pub fn u_integral_line(a: &[Complex64], beta: &[Complex64], hbar: f64, precision: &PrecisionConfig) -> Result<Complex64> {
    let book = PoleBook::new(
        a.iter().map(|x| Ladder::new(x + hbar, real(hbar))).collect(),
        a.iter().map(|x| Ladder::new(*x, real(-hbar))).collect(),
    );
    let lo = a.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max);
    let hi = a.iter().map(|x| x.re + hbar).fold(f64::INFINITY, f64::min);
    if lo >= hi {
        return Err(Error::ContourConstruction("u-contour gap is empty".into()));
    }
    let line = VerticalLine::new(0.5 * (lo + hi), Orientation::Down, &book, 50)?;
    let f = |u: Complex64| {
        beta.iter().map(|b| sin_pi((u - b) / (2.0 * hbar))).product::<Complex64>()
            / a.iter().map(|x| sin_pi((u - x) / hbar)).product::<Complex64>()
    };
    Ok(integrate_vertical(&f, &line, precision)?.value)
}

/// Σ_{r=1,2} (−1)^{rL} (a+rħ) ∏ⱼ sin(π(a+rħ−βⱼ)/2ħ) with L = number of
/// u-poles per strip.
fn strip_sum(a: Complex64, beta: &[Complex64], hbar: f64, count: usize) -> Complex64 {
    (1..=2)
        .map(|r| {
            let p = a + r as f64 * hbar;
            let sign = if (r * count).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * p * beta.iter().map(|b| sin_pi((p - b) / (2.0 * hbar))).product::<Complex64>()
        })
        .sum()
}

fn log_add(a: Complex64, b: Complex64) -> Complex64 {
    if !a.re.is_finite() {
        return b;
    }
    if !b.re.is_finite() {
        return a;
    }
    let m = a.re.max(b.re);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Logarithm of `strip_sum`.
fn ln_strip_sum(a: Complex64, beta: &[Complex64], hbar: f64, count: usize) -> Complex64 {
    let mut out = Complex64::new(f64::NEG_INFINITY, 0.0);
    for r in 1..=2 {
        let p = a + r as f64 * hbar;
        let sign = if (r * count).is_multiple_of(2) { 0.0 } else { PI };
        let term = p.ln() + Complex64::new(0.0, sign) + beta.iter().map(|b| ln_sin_pi((p - b) / (2.0 * hbar))).sum::<Complex64>();
        out = log_add(out, term);
    }
    out
}

/// ∏_{i<l} sin(π(aᵢ−aₗ)/ħ) × `u_integral_exact`, written without the
/// removable 0/0 at coinciding aᵢ − aₗ ∈ ħℤ.
pub fn u_integral_entire(a: &[Complex64], beta: &[Complex64], hbar: f64) -> Complex64 {
    let count = a.len();
    let mut total = real(0.0);
    for i in 0..count {
        let mut vand = real(1.0);
        for x in 0..count {
            for y in (x + 1)..count {
                if x != i && y != i {
                    vand *= sin_pi((a[x] - a[y]) / hbar);
                }
            }
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * vand * strip_sum(a[i], beta, hbar, count);
    }
    -total / (2.0 * PI)
}

/// Line nodes t = sinh(s) on a uniform s-grid (with their grid index), plus
/// clockwise circles.
struct GridNodes {
    points: Vec<Complex64>,
    weights: Vec<Complex64>,
    grid: Vec<Option<i64>>,
    step: f64,
}

fn sinh_nodes(line: &VerticalLine, excisions: &[Excision], step: f64, t_max: f64, circle_nodes: usize) -> GridNodes {
    let k = (t_max.asinh() / step).ceil() as i64;
    let mut out = GridNodes { points: Vec::new(), weights: Vec::new(), grid: Vec::new(), step };
    let sign = line.orientation().sign();
    for j in -k..=k {
        let s = j as f64 * step;
        out.points.push(line.point(s.sinh()));
        out.weights.push(real(sign * step * s.cosh() / (2.0 * PI)));
        out.grid.push(Some(j));
    }
    for e in excisions {
        for j in 0..circle_nodes {
            let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / circle_nodes as f64);
            out.points.push(e.center + z * e.radius);
            out.weights.push(-z * e.radius / circle_nodes as f64);
            out.grid.push(None);
        }
    }
    out
}

/// Nominal truncation heights for the 1/T extrapolation of algebraic tails;
/// the actual heights are moved onto grid nodes.
const TAIL_HEIGHTS: [f64; 5] = [62.5, 125.0, 250.0, 500.0, 1000.0];

impl GridNodes {
    fn levels(&self) -> Vec<i64> {
        TAIL_HEIGHTS.iter().map(|t| (t.asinh() / self.step).round() as i64).collect()
    }

    /// Trapezoid factor of node i when truncating at grid index `level`:
    /// the boundary nodes get half weight so the truncated sums vary
    /// smoothly with the height.
    fn factor(&self, i: usize, level: i64) -> f64 {
        match self.grid[i] {
            None => 1.0,
            Some(j) if j.abs() < level => 1.0,
            Some(j) if j.abs() == level => 0.5,
            Some(_) => 0.0,
        }
    }
}

/// An integral with algebraically decaying tails, extrapolated in 1/T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailExtrapolated {
    pub value: Complex64,
    pub extrapolation_error: f64,
    pub discretization_error: f64,
    /// Value truncated at the largest height, before extrapolation.
    pub truncated: Complex64,
}

fn extrapolate_levels(nodes: &GridNodes, partial: &[Complex64]) -> (Complex64, f64, Complex64) {
    let xs: Vec<f64> = nodes.levels().iter().map(|l| 1.0 / (*l as f64 * nodes.step).sinh()).collect();
    let (value, err) = extrapolate_to_zero(&xs, partial);
    (value, err, partial[partial.len() - 1])
}

/// Mixed trace with 2n type II points and the pair Φ₊(ζ)Φ₋(ζ+ħ) at γ = 2ħ,
/// with the u-integral done exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedTracePair {
    pub value: Complex64,
    pub prefactor: Complex64,
    pub integral: TailExtrapolated,
}

fn mixed_prefactor(beta: &[Complex64], zeta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let n = beta.len() / 2;
    let h = params.hbar();
    let a = trace_constant_a(TraceShape::new(2 * n, 2, n, 1)?, params, precision)?;
    let g0 = g_fn(real(0.0), params, precision)?.sqrt();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut pre = a * PI.powf(1.5) * sign / (2f64.powi(n as i32 + 1) * (2.0 * h).powf((n as f64) * (n as f64 - 3.0) / 2.0) * g0);
    for j in 0..beta.len() {
        for jp in (j + 1)..beta.len() {
            pre *= zeta_tilde_fn(beta[j] - beta[jp], params, precision)?;
        }
    }
    for b in beta {
        pre /= cos_pi((zeta - b) / (2.0 * h));
    }
    Ok(pre)
}

pub fn trace_mixed_2_2n(
    beta: &[Complex64],
    eps: &[Sign],
    zeta: Complex64,
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<MixedTracePair> {
    if !params.is_free_point() {
        return Err(Error::InvalidParameter("the mixed trace is taken at γ = 2ħ".into()));
    }
    if beta.len() != eps.len() || !(beta.len() == 2 || beta.len() == 4) {
        return Err(Error::Unsupported("2 or 4 type II points".into()));
    }
    check_distinct(beta)?;
    let n = beta.len() / 2;
    let b_list: Vec<usize> = eps.iter().enumerate().filter(|(_, e)| **e == Sign::Plus).map(|(i, _)| i).collect();
    if b_list.len() != n {
        return Err(Error::Condition { big_n: 2 * n, big_m: 2, n: b_list.len(), m: 1 });
    }
    let h = params.hbar();
    let prefactor = mixed_prefactor(beta, zeta, params, precision)?;
    let contour = type_ii_contour(beta, params, &ContourOptions::default(), precision.max_ladder_terms)?;
    // logarithms of the per-node factors: the φ-products underflow and the
    // sine products overflow far out on the line, their products do not
    let ln_single = |v: Complex64, k: usize| -> Complex64 {
        let mut out = poly_p_tilde(&[v], beta, &b_list[k..k + 1], params).ln();
        for b in beta {
            let x = (v - b) / (2.0 * h);
            out += log_gamma(-x).unwrap_or(Complex64::new(f64::NAN, 0.0)) + log_gamma(0.5 + x).unwrap_or(Complex64::new(f64::NAN, 0.0))
                - (v - b - h).ln();
        }
        out
    };
    let count = n + 1;
    let strip_zeta = strip_sum(zeta, beta, h, count);
    let run = |step: f64| -> Result<(Complex64, f64, Complex64)> {
        let nodes = sinh_nodes(&contour.line, &contour.excisions, step, TAIL_HEIGHTS[TAIL_HEIGHTS.len() - 1], 96);
        let ln_strip: Vec<Complex64> = nodes.points.iter().map(|v| ln_strip_sum(*v, beta, h, count)).collect();
        let levels = nodes.levels();
        let mut partial = vec![real(0.0); levels.len()];
        if n == 1 {
            for (i, v) in nodes.points.iter().enumerate() {
                let ls = ln_single(*v, 0);
                let value = -((ls + ln_strip[i]).exp() - ls.exp() * strip_zeta) / (2.0 * PI) * nodes.weights[i];
                for (acc, level) in partial.iter_mut().zip(&levels) {
                    *acc += value * nodes.factor(i, *level);
                }
            }
        } else {
            let ln_sin_z: Vec<Complex64> = nodes.points.iter().map(|v| ln_sin_pi((v - zeta) / h)).collect();
            let ln_sv: Vec<Complex64> = nodes.points.iter().map(|v| ln_sin_pi(v / h)).collect();
            let ln_cv: Vec<Complex64> = nodes.points.iter().map(|v| ln_cos_pi(v / h)).collect();
            let factors = |k: usize| -> [Vec<Complex64>; 4] {
                let ls: Vec<Complex64> = nodes.points.iter().map(|v| ln_single(*v, k)).collect();
                let comb = |other: &[Complex64]| ls.iter().zip(other).map(|(a, b)| (a + b).exp()).collect::<Vec<_>>();
                [comb(&ln_strip), comb(&ln_sin_z), comb(&ln_sv), comb(&ln_cv)]
            };
            let [st1, sz1, sv1, cv1] = factors(0);
            let [st2, sz2, sv2, cv2] = factors(1);
            let factors: Vec<Vec<f64>> =
                levels.iter().map(|l| (0..nodes.points.len()).map(|i| nodes.factor(i, *l)).collect()).collect();
            for i in 0..nodes.points.len() {
                for j in 0..nodes.points.len() {
                    // ∏ sin over pairs of (v₁, v₂, ζ) times the exact u-integral
                    let u_part = st1[i] * sz2[j] - sz1[i] * st2[j] + strip_zeta * (sv1[i] * cv2[j] - cv1[i] * sv2[j]);
                    let term = -(nodes.points[i] - nodes.points[j] - h) * u_part / (2.0 * PI) * nodes.weights[i] * nodes.weights[j];
                    for (acc, f) in partial.iter_mut().zip(&factors) {
                        *acc += term * (f[i] * f[j]);
                    }
                }
            }
        }
        if partial.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Nonconvergence("mixed-trace integrand not finite on the contour".into()));
        }
        Ok(extrapolate_levels(&nodes, &partial))
    };
    let (fine, extrapolation_error, truncated) = run(0.04)?;
    let (coarse, _, _) = run(0.06)?;
    let integral = TailExtrapolated {
        value: fine,
        extrapolation_error,
        discretization_error: (fine - coarse).norm(),
        truncated,
    };
    Ok(MixedTracePair { value: prefactor * fine, prefactor, integral })
}

/// The single-integral four-point expression with kernel
/// (v−β₁+ħ)(v−β₂+ħ) + (v−β₃)(v−β₄) on the line between the ladders
/// βⱼ − 2ħr (left) and βⱼ + ħ + 2ħr (right).
pub fn form_factor_integral(beta: [Complex64; 4], params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    if !params.is_free_point() {
        return Err(Error::InvalidParameter("the form factor is taken at γ = 2ħ".into()));
    }
    check_distinct(&beta)?;
    let h = params.hbar();
    let lo = beta.iter().map(|b| b.re).fold(f64::NEG_INFINITY, f64::max);
    let hi = beta.iter().map(|b| b.re + h).fold(f64::INFINITY, f64::min);
    if lo >= hi {
        return Err(Error::ContourConstruction("points spread by ħ or more".into()));
    }
    let book = PoleBook::new(
        beta.iter().map(|b| Ladder::new(b + h, real(2.0 * h))).collect(),
        beta.iter().map(|b| Ladder::new(*b, real(-2.0 * h))).collect(),
    );
    let line = VerticalLine::new(0.5 * (lo + hi), Orientation::Down, &book, precision.max_ladder_terms)?;
    let [b1, b2, b3, b4] = beta;
    let f = |v: Complex64| {
        beta.iter().map(|b| varphi_or_nan(b - v, h)).product::<Complex64>()
            * exp_phase(v, -1.0, h)
            * ((v - b1 + h) * (v - b2 + h) + (v - b3) * (v - b4))
    };
    let integral = integrate_vertical(&f, &line, precision)?.value;
    let mut pre = real(1.0);
    for j in 0..4 {
        for jp in (j + 1)..4 {
            pre *= zeta_tilde_fn(beta[j] - beta[jp], params, precision)?;
        }
    }
    for i in 0..2 {
        for j in 2..4 {
            pre /= beta[j] - beta[i] + h;
        }
    }
    let sum: Complex64 = beta.iter().sum();
    pre *= exp_phase(sum, 1.0, 2.0 * h) / beta.iter().map(|b| exp_phase(*b, 1.0, h)).sum::<Complex64>();
    Ok(pre * integral)
}

/// The mixed four-point trace (−,−,+,+) at several ζ against the single
/// integral expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFactorComparison {
    pub form_factor: Complex64,
    pub traces: Vec<(Complex64, Complex64)>,
    /// max over ζ of |trace − form factor| / |form factor|.
    pub residual: f64,
    /// max over ζ pairs of the relative spread of the trace values.
    pub zeta_spread: f64,
}

pub fn compare_mixed_with_form_factor(
    beta: [Complex64; 4],
    zetas: &[Complex64],
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<FormFactorComparison> {
    let form_factor = form_factor_integral(beta, params, precision)?;
    let eps = [Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus];
    let mut traces = Vec::new();
    for z in zetas {
        traces.push((*z, trace_mixed_2_2n(&beta, &eps, *z, params, precision)?.value));
    }
    let residual = traces.iter().map(|(_, t)| relative_residual(*t, form_factor)).fold(0.0, f64::max);
    let mut zeta_spread: f64 = 0.0;
    for (_, a) in &traces {
        for (_, b) in &traces {
            zeta_spread = zeta_spread.max(relative_residual(*a, *b));
        }
    }
    Ok(FormFactorComparison { form_factor, traces, residual, zeta_spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_core::{c64, gamma_fn};

    fn prec() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    fn triple() -> [Complex64; 3] {
        [c64(0.05, 0.1), c64(0.2, -0.05), c64(0.12, 0.02)]
    }

    #[test]
    fn quasi_periodicity() {
        for v in [c64(0.3, 0.7), c64(-1.7, 0.2), c64(2.5, -3.0)] {
            let lhs = varphi(v + 2.0, 1.0).unwrap();
            let rhs = -(v + 1.0) / (v + 2.0) * varphi(v, 1.0).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        }
        let q = gamma_fn(real(0.25)).unwrap();
        assert!((varphi(real(-0.5), 1.0).unwrap() - q * q).norm() < 1e-12);
        assert!(matches!(varphi(real(0.0), 1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn total_difference_identity_holds() {
        for m in 1..=3 {
            for s in [Sign::Plus, Sign::Minus] {
                let c = total_difference_identity(m, s, triple(), 1.0, &prec(), &ContourOptions::default()).unwrap();
                assert!(c.residual < 1e-10, "{m} {s:?} {c:?}");
            }
        }
    }

    #[test]
    fn derived_connection_closes_and_printed_does_not() {
        let beta = triple();
        for k in [Sign::Plus, Sign::Minus] {
            let derived = gm_residual(beta, k, 1.0, &gm_connection(beta, 1.0), &prec()).unwrap();
            assert!(derived[0] < 1e-10 && derived[1] < 1e-10, "{derived:?}");
            let printed = gm_residual(beta, k, 1.0, &gm_connection_printed(beta, 1.0), &prec()).unwrap();
            assert!(printed[0].max(printed[1]) > 1e-3);
        }
    }

    #[test]
    fn corrections_have_rank_one() {
        for corr in [gm_correction_printed(triple(), 1.0), gm_correction_derived(triple(), 1.0)] {
            assert!((corr[0][0] * corr[1][1] - corr[0][1] * corr[1][0]).norm() < 1e-14);
        }
    }

    #[test]
    fn derived_four_point_kernel() {
        let beta = [c64(0.05, 0.1), c64(0.2, -0.05), c64(0.12, 0.02), c64(0.3, 0.0)];
        for s in [Sign::Plus, Sign::Minus] {
            let c = gm_identity_n2(beta, s, 1.0, QuadraticKernel::Derived, &prec()).unwrap();
            assert!(c.residual < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn elliptic_against_agm() {
        // complete elliptic integral K(k) = π / (2 AGM(1, √(1−k²)))
        fn agm(mut a: f64, mut b: f64) -> f64 {
            for _ in 0..40 {
                let next = (0.5 * (a + b), (a * b).sqrt());
                a = next.0;
                b = next.1;
            }
            a
        }
        let k_of = |m: f64| PI / (2.0 * agm(1.0, (1.0 - m).sqrt()));
        let beta = [0.0, 1.0, 2.0];
        let upper = elliptic_period(0, beta, Segment::Upper, &prec()).unwrap();
        assert!((upper - 2.0 * k_of(0.5) / 2f64.sqrt()).abs() < 1e-12);
        let beta = [-0.3, 0.4, 2.5];
        let lower = elliptic_period(0, beta, Segment::Lower, &prec()).unwrap();
        assert!((lower - 2.0 * k_of(0.7 / 2.8) / 2.8f64.sqrt()).abs() < 1e-12);
        assert!(matches!(elliptic_period(0, [1.0, 0.0, 2.0], Segment::Lower, &prec()), Err(Error::Ordering)));
    }

    #[test]
    fn classical_identity() {
        assert!(classical_identity_residual([0.0, 1.0, 3.0], &prec()).unwrap() < 1e-10);
    }

    #[test]
    fn u_integral_routes_agree() {
        let beta = [c64(0.1, 0.05), real(0.2), c64(0.05, -0.1), c64(0.25, 0.1)];
        let a = [c64(0.3, 0.2), real(0.1)];
        let exact = u_integral_exact(&a, &beta[..2], 1.0);
        let line = u_integral_line(&a, &beta[..2], 1.0, &prec()).unwrap();
        assert!(relative_residual(exact, line) < 1e-10);
        let a = [c64(0.3, 0.2), c64(0.1, -0.3), real(0.5)];
        let exact = u_integral_exact(&a, &beta, 1.0);
        let line = u_integral_line(&a, &beta, 1.0, &prec()).unwrap();
        assert!(relative_residual(exact, line) < 1e-10);
        let vand = sin_pi(a[0] - a[1]) * sin_pi(a[0] - a[2]) * sin_pi(a[1] - a[2]);
        assert!(relative_residual(u_integral_entire(&a, &beta, 1.0), vand * exact) < 1e-12);
    }

    #[test]
    fn bracket_expansion() {
        // e^{iπ(Σβ−ζ)/4ħ}[∏sin + i∏cos] = (i/4)(e^{iπζ/2ħ} + B₂ e^{−iπζ/2ħ})
        let beta = triple();
        let zeta = c64(0.4, 0.3);
        let sum: Complex64 = beta.iter().sum();
        let lhs = exp_phase(sum - zeta, 1.0, 4.0) * mixed_bracket(zeta, beta, 1.0);
        let rhs = I / 4.0 * (exp_phase(zeta, 1.0, 2.0) + third_point_coefficient(beta, 1.0) * exp_phase(zeta, -1.0, 2.0));
        assert!(relative_residual(lhs, rhs) < 1e-13);
    }

    #[test]
    fn mixed_three_point_reduction() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let t = trace_mixed_1_3(triple(), c64(0.3, 0.1), &params, &prec()).unwrap();
        assert!(t.reduction_residual < 1e-9, "{t:?}");
    }

    #[test]
    fn mixed_pair_two_point_integral() {
        // frozen observation: the single v-integral of the n = 1 mixed trace is π
        let params = DeformParams::real(1.0, 2.0).unwrap();
        for (b, z, e) in [
            ([c64(0.3, 0.2), real(-0.1)], c64(0.37, 0.3), [Sign::Minus, Sign::Plus]),
            ([c64(0.1, -0.4), real(0.4)], c64(-0.8, 0.1), [Sign::Plus, Sign::Minus]),
        ] {
            let m = trace_mixed_2_2n(&b, &e, z, &params, &prec()).unwrap();
            assert!((m.integral.value - PI).norm() < 1e-9, "{m:?}");
        }
    }

    #[test]
    fn mixed_pair_four_point_converges() {
        let params = DeformParams::real(1.0, 2.0).unwrap();
        let beta = [c64(0.1, 0.05), real(0.2), c64(0.05, -0.1), c64(0.25, 0.1)];
        let eps = [Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus];
        let m = trace_mixed_2_2n(&beta, &eps, c64(0.37, 0.3), &params, &prec()).unwrap();
        let scale = m.integral.value.norm();
        assert!(m.integral.extrapolation_error < 1e-8 * scale && m.integral.discretization_error < 1e-8 * scale, "{m:?}");
    }
}
