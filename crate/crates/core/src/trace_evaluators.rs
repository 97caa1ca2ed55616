//! Traces of products of type I and type II intertwiners: the general
//! contour-integral formula for small sizes, the two-point closed forms,
//! the split of the γ = 2ħ type I integrand into one-sided pieces, and the
//! vanishing of type II traces at γ = 2ħ.

use crate::barnes_functions::{g_fn, g_tilde_fn, trace_constant_a, zeta_bar_fn, zeta_fn, zeta_tilde_fn, TraceShape};
use crate::contour_quadrature::{
    cluster_circle, downward_line_by_arcs, integrate_vertical, principal_value_vertical, residue_at, Excision, Ladder,
    NodeSet, Orientation, PoleBook, VerticalLine,
};
use crate::error::{Error, Result};
use crate::special_core::{
    cos_pi, gamma_fn, is_gamma_pole, log_gamma, real, relative_residual, sin_pi, DeformParams, PrecisionConfig,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for asserting agreement between independent routes.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {v}"))),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Type II rapidities β_j with components ε_j and type I spectral
/// parameters ζ_i with components ν_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSpec {
    type_ii: Vec<(Complex64, Sign)>,
    type_i: Vec<(Complex64, Sign)>,
    params: DeformParams,
}

/// Positions (0-based) of the plus components.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IndexSets {
    pub b_list: Vec<usize>,
    pub a_list: Vec<usize>,
}

fn plus_positions(points: &[(Complex64, Sign)]) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, (_, s))| *s == Sign::Plus)
        .map(|(i, _)| i)
        .collect()
}

impl TraceSpec {
    pub fn new(type_ii: Vec<(Complex64, Sign)>, type_i: Vec<(Complex64, Sign)>, params: DeformParams) -> Result<Self> {
        let spec = Self { type_ii, type_i, params };
        spec.shape()?;
        Ok(spec)
    }

    pub fn shape(&self) -> Result<TraceShape> {
        let idx = self.index_sets();
        TraceShape::new(self.type_ii.len(), self.type_i.len(), idx.b_list.len(), idx.a_list.len())
    }

    pub fn index_sets(&self) -> IndexSets {
        IndexSets { b_list: plus_positions(&self.type_ii), a_list: plus_positions(&self.type_i) }
    }

    pub fn params(&self) -> &DeformParams {
        &self.params
    }

    pub fn betas(&self) -> Vec<Complex64> {
        self.type_ii.iter().map(|(b, _)| *b).collect()
    }

    pub fn zetas(&self) -> Vec<Complex64> {
        self.type_i.iter().map(|(z, _)| *z).collect()
    }
}

/// ∏_p [∏_{i<a_p} (u_p − ζ_i) ∏_{i>a_p} (u_p − ζ_i − ħ)].
pub fn poly_p(u: &[Complex64], zeta: &[Complex64], a_list: &[usize], params: &DeformParams) -> Complex64 {
    let h = params.hbar();
    let mut out = real(1.0);
    for (up, &ap) in u.iter().zip(a_list) {
        for (i, z) in zeta.iter().enumerate() {
            if i < ap {
                out *= up - z;
            } else if i > ap {
                out *= up - z - h;
            }
        }
    }
    out
}

/// ∏_k [∏_{j>b_k} (v_k − β_j) ∏_{j<b_k} (v_k − β_j − ħ)].
pub fn poly_p_tilde(v: &[Complex64], beta: &[Complex64], b_list: &[usize], params: &DeformParams) -> Complex64 {
    let h = params.hbar();
    let mut out = real(1.0);
    for (vk, &bk) in v.iter().zip(b_list) {
        for (j, b) in beta.iter().enumerate() {
            if j > bk {
                out *= vk - b;
            } else if j < bk {
                out *= vk - b - h;
            }
        }
    }
    out
}

fn nan() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

/// Γ(z), or NaN on a pole so that quadrature reports it.
pub(crate) fn gamma_or_nan(z: Complex64) -> Complex64 {
    log_gamma(z).map(|l| l.exp()).unwrap_or_else(|_| nan())
}

/// 1/Γ(z), entire.
pub(crate) fn recip_gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        real(0.0)
    } else {
        log_gamma(z).map(|l| (-l).exp()).unwrap_or(real(0.0))
    }
}

/// Where to put the vertical line inside its admissible gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourOptions {
    /// 0 is the left end of the gap, 1 the right end.
    pub gap_fraction: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { gap_fraction: 0.5 }
    }
}

fn gap_point(lo: f64, hi: f64, options: &ContourOptions, what: &str) -> Result<f64> {
    if lo >= hi {
        return Err(Error::ContourConstruction(format!(
            "{what}: no room for a vertical line between Re = {lo} and Re = {hi}"
        )));
    }
    Ok(lo + options.gap_fraction.clamp(0.05, 0.95) * (hi - lo))
}

/// Downward line for the u-integrals: ζ_j + ħ + rγ on the right, ζ_j − rγ
/// on the left.
pub fn type_i_contour(zeta: &[Complex64], params: &DeformParams, options: &ContourOptions, terms: usize) -> Result<VerticalLine> {
    let h = params.hbar();
    let g = params.gamma();
    let lo = zeta.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let hi = zeta.iter().map(|z| z.re + h).fold(f64::INFINITY, f64::min);
    let x = gap_point(lo, hi, options, "type I contour")?;
    let book = PoleBook::new(
        zeta.iter().map(|z| Ladder::new(z + h, g)).collect(),
        zeta.iter().map(|z| Ladder::new(*z, -g)).collect(),
    );
    VerticalLine::new(x, Orientation::Down, &book, terms)
}

/// The v-contour: a downward line with βⱼ + rγ on the right and
/// βⱼ + ħ − (r+1)γ on the left, with the misplaced poles βⱼ + ħ cut out by
/// clockwise circles.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeIIContour {
    pub line: VerticalLine,
    pub excisions: Vec<Excision>,
}

impl TypeIIContour {
    pub fn describe(&self) -> String {
        let circles: Vec<String> = self
            .excisions
            .iter()
            .map(|e| format!("circle({:.4}{:+.4}i, r={:.4})", e.center.re, e.center.im, e.radius))
            .collect();
        format!("line Re v = {:.6} downward minus {}", self.line.real_part(), circles.join(", "))
    }
}

pub fn type_ii_contour(beta: &[Complex64], params: &DeformParams, options: &ContourOptions, terms: usize) -> Result<TypeIIContour> {
    let h = params.hbar();
    let g = params.gamma();
    let lo = beta.iter().map(|b| (b + h - g).re).fold(f64::NEG_INFINITY, f64::max);
    let hi = beta.iter().map(|b| b.re).fold(f64::INFINITY, f64::min);
    let x = gap_point(lo, hi, options, "type II contour")?;
    let book = PoleBook::new(
        beta.iter().map(|b| Ladder::new(*b, g)).collect(),
        beta.iter().map(|b| Ladder::new(b + h - g, -g)).collect(),
    );
    let line = VerticalLine::new(x, Orientation::Down, &book, terms)?;
    let cut: Vec<Complex64> = beta.iter().map(|b| b + h).collect();
    let mut obstacles: Vec<Complex64> = Vec::new();
    for b in beta {
        obstacles.extend([*b, b + g, b + h - g, b + g + g]);
    }
    let excisions = match cluster_circle(&cut, &obstacles, Some(x)) {
        Ok(e) => vec![e],
        Err(_) => {
            let mut out = Vec::new();
            for (i, p) in cut.iter().enumerate() {
                let mut others = obstacles.clone();
                others.extend(cut.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| *q));
                out.push(cluster_circle(&[*p], &others, Some(x))?);
            }
            out
        }
    };
    Ok(TypeIIContour { line, excisions })
}

/// ∫ f dv/2πi on a type II contour with its absolute-value scale.
fn integrate_type_ii_1d<F>(f: &F, contour: &TypeIIContour, precision: &PrecisionConfig) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let line = integrate_vertical(f, &contour.line, precision)?;
    let mut value = line.value;
    let mut scale = line.abs_integral;
    for e in &contour.excisions {
        value -= residue_at(f, e.center, e.radius, precision)?;
        scale += NodeSet::circle(e.center, e.radius, 256, 1.0).integrate(f).1;
    }
    Ok((value, scale))
}

/// Node set realizing a contour for tensor-product integration.
fn contour_nodes(line: &VerticalLine, excisions: &[Excision], step: f64, t_lo: f64, t_hi: f64, circle_nodes: usize) -> NodeSet {
    let mut set = NodeSet::line(line, step, t_lo, t_hi);
    for e in excisions {
        set.extend(NodeSet::circle(e.center, e.radius, circle_nodes, -1.0));
    }
    set
}

/// Step and window for tensor rules, from the adaptive rule on a one-variable
/// slice inflated by the growth the coupling factors can contribute.
fn tensor_window<F>(single: &F, line: &VerticalLine, growth: f64, precision: &PrecisionConfig) -> Result<(f64, f64, f64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let slice = |v: Complex64| single(v) * (growth * v.im).cosh();
    let r = integrate_vertical(&slice, line, precision)?;
    Ok((r.step / 1.5, 1.3 * r.t_lo, 1.3 * r.t_hi))
}

/// Σ_{i,j} w_i w_j s₁(v_i) s₂(v_j) c(v_i − v_j) and the matching Σ|·|.
/// The first `line_nodes` points are equispaced on a vertical line with
/// spacing `step`, so the coupling between two of them is tabulated by
/// index difference.
fn tensor_sum<C>(set: &NodeSet, line_nodes: usize, step: f64, s1: &[Complex64], s2: &[Complex64], cross: &C) -> (Complex64, f64)
where
    C: Fn(Complex64) -> Complex64,
{
    let table: Vec<Complex64> = (0..2 * line_nodes.max(1) - 1)
        .map(|d| cross(Complex64::new(0.0, step * (d as f64 - (line_nodes as f64 - 1.0)))))
        .collect();
    let a: Vec<Complex64> = s1.iter().zip(&set.weights).map(|(x, w)| x * w).collect();
    let b: Vec<Complex64> = s2.iter().zip(&set.weights).map(|(x, w)| x * w).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for i in 0..set.len() {
        if a[i].norm() == 0.0 {
            continue;
        }
        for j in 0..set.len() {
            let c = if i < line_nodes && j < line_nodes {
                table[i + line_nodes - 1 - j]
            } else {
                cross(set.points[i] - set.points[j])
            };
            let term = a[i] * b[j] * c;
            total += term;
            abs += term.norm();
        }
    }
    (total, abs)
}

/// A two-variable contour integral with a refinement-based error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorIntegral {
    pub value: Complex64,
    pub abs_scale: f64,
    pub error_estimate: f64,
    pub nodes_per_axis: usize,
}

fn tensor_integral_2d<S1, S2, C>(
    s1: &S1,
    s2: &S2,
    cross: &C,
    line: &VerticalLine,
    excisions: &[Excision],
    growth: f64,
    precision: &PrecisionConfig,
) -> Result<TensorIntegral>
where
    S1: Fn(Complex64) -> Complex64,
    S2: Fn(Complex64) -> Complex64,
    C: Fn(Complex64) -> Complex64,
{
    let (step, t_lo, t_hi) = tensor_window(s1, line, growth, precision)?;
    let run = |step: f64, t_lo: f64, t_hi: f64, k: usize| -> Result<(Complex64, f64, usize)> {
        let set = contour_nodes(line, excisions, step, t_lo, t_hi, k);
        let line_nodes = set.len() - k * excisions.len();
        if set.len() > precision.max_quad_nodes / 20 {
            return Err(Error::Nonconvergence(format!("tensor rule needs {} nodes per axis", set.len())));
        }
        let v1: Vec<Complex64> = set.points.iter().map(|v| s1(*v)).collect();
        let v2: Vec<Complex64> = set.points.iter().map(|v| s2(*v)).collect();
        if v1.iter().chain(&v2).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Nonconvergence("integrand not finite on the contour".into()));
        }
        let (value, abs) = tensor_sum(&set, line_nodes, step, &v1, &v2, cross);
        Ok((value, abs, set.len()))
    };
    let (coarse, _, _) = run(step * 1.3, t_lo / 1.2, t_hi / 1.2, 96)?;
    let (value, abs_scale, nodes) = run(step, t_lo, t_hi, 128)?;
    Ok(TensorIntegral { value, abs_scale, error_estimate: (value - coarse).norm(), nodes_per_axis: nodes })
}

/// sin(πw/γ)/(Γ((w−ħ)/γ)Γ((γ−ħ−w)/γ)) with w = v_k − v_k'.
fn type_ii_coupling(w: Complex64, params: &DeformParams) -> Complex64 {
    let (h, g) = (params.hbar(), params.gamma());
    sin_pi(w / g) * recip_gamma((w - h) / g) * recip_gamma((g - h - w) / g)
}

/// sin(πw/γ)/(Γ((w+ħ)/γ)Γ((γ+ħ−w)/γ)) with w = u_p − u_p'.
fn type_i_coupling(w: Complex64, params: &DeformParams) -> Complex64 {
    let (h, g) = (params.hbar(), params.gamma());
    sin_pi(w / g) * recip_gamma((w + h) / g) * recip_gamma((g + h - w) / g)
}

/// One-variable part of the v-integrand for the k-th variable.
fn type_ii_single(v: Complex64, k: usize, spec: &TraceSpec, idx: &IndexSets) -> Complex64 {
    let params = &spec.params;
    let (h, g) = (params.hbar(), params.gamma());
    let beta = spec.betas();
    let n_big = beta.len();
    let mut val = poly_p_tilde(&[v], &beta, &idx.b_list[k..k + 1], params) / g.powf((n_big - 1) as f64);
    for b in &beta {
        val *= gamma_or_nan((b - v) / g) * gamma_or_nan((v - b - h) / g);
    }
    for z in spec.zetas() {
        val *= sin_pi((v - z) / g);
    }
    val
}

/// One-variable part of the u-integrand for the p-th variable.
fn type_i_single(u: Complex64, p: usize, spec: &TraceSpec, idx: &IndexSets) -> Complex64 {
    let params = &spec.params;
    let (h, g) = (params.hbar(), params.gamma());
    let zeta = spec.zetas();
    let m_big = zeta.len();
    let mut val = poly_p(&[u], &zeta, &idx.a_list[p..p + 1], params) / g.powf((m_big - 1) as f64);
    for z in &zeta {
        val *= gamma_or_nan((u - z) / g) * gamma_or_nan((z - u + h) / g);
    }
    for b in spec.betas() {
        val *= sin_pi((u - b) / g);
    }
    val
}

/// Product of the ζ, ζ̃, ζ̄ prefactors and the constant A.
pub fn trace_prefactor(spec: &TraceSpec, precision: &PrecisionConfig) -> Result<Complex64> {
    let params = &spec.params;
    let mut value = trace_constant_a(spec.shape()?, params, precision)?;
    let beta = spec.betas();
    let zeta = spec.zetas();
    for j in 0..beta.len() {
        for jp in (j + 1)..beta.len() {
            value *= zeta_tilde_fn(beta[j] - beta[jp], params, precision)?;
        }
    }
    for i in 0..zeta.len() {
        for ip in (i + 1)..zeta.len() {
            value *= zeta_fn(zeta[i] - zeta[ip], params, precision)?;
        }
    }
    for z in &zeta {
        for b in &beta {
            value *= zeta_bar_fn(z - b, params, precision)?;
        }
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvaluation {
    pub value: Complex64,
    pub prefactor: Complex64,
    pub integral: Complex64,
    /// ∫|integrand| over the realized contour (same normalization).
    pub abs_scale: f64,
    pub error_estimate: f64,
    pub contour: String,
}

pub fn general_trace(spec: &TraceSpec, precision: &PrecisionConfig) -> Result<TraceEvaluation> {
    general_trace_with(spec, precision, &ContourOptions::default())
}

pub fn general_trace_with(spec: &TraceSpec, precision: &PrecisionConfig, options: &ContourOptions) -> Result<TraceEvaluation> {
    let shape = spec.shape()?;
    let idx = spec.index_sets();
    let params = spec.params;
    if shape.n > 0 && shape.m > 0 {
        return Err(Error::Unsupported(
            "traces with both u- and v-integrations (n·m > 0); use the dedicated mixed evaluator".into(),
        ));
    }
    if shape.n > 2 || shape.m > 2 {
        return Err(Error::Unsupported("more than two nested contour integrals".into()));
    }
    let prefactor = trace_prefactor(spec, precision)?;
    let terms = precision.max_ladder_terms;
    let (integral, abs_scale, error_estimate, contour) = if shape.n == 0 && shape.m == 0 {
        (real(1.0), 1.0, 0.0, "none".to_string())
    } else if shape.n > 0 {
        let c = type_ii_contour(&spec.betas(), &params, options, terms)?;
        let idx = &idx;
        let s = |k: usize| move |v: Complex64| type_ii_single(v, k, spec, idx);
        if shape.n == 1 {
            let (value, scale) = integrate_type_ii_1d(&s(0), &c, precision)?;
            (value, scale, 0.0, c.describe())
        } else {
            let cross = |w: Complex64| type_ii_coupling(w, &params);
            let growth = 2.0 * PI / params.gamma().norm();
            let t = tensor_integral_2d(&s(0), &s(1), &cross, &c.line, &c.excisions, growth, precision)?;
            (t.value, t.abs_scale, t.error_estimate, format!("{} (tensor, {} nodes per axis)", c.describe(), t.nodes_per_axis))
        }
    } else {
        let line = type_i_contour(&spec.zetas(), &params, options, terms)?;
        let idx = &idx;
        let s = |p: usize| move |u: Complex64| type_i_single(u, p, spec, idx);
        let describe = format!("line Re u = {:.6} downward", line.real_part());
        if shape.m == 1 {
            let r = integrate_vertical(&s(0), &line, precision)?;
            (r.value, r.abs_integral, 0.0, describe)
        } else {
            let cross = |w: Complex64| type_i_coupling(w, &params);
            let growth = 2.0 * PI / params.gamma().norm();
            let t = tensor_integral_2d(&s(0), &s(1), &cross, &line, &[], growth, precision)?;
            (t.value, t.abs_scale, t.error_estimate, format!("{describe} (tensor, {} nodes per axis)", t.nodes_per_axis))
        }
    };
    Ok(TraceEvaluation {
        value: prefactor * integral,
        prefactor,
        integral,
        abs_scale,
        error_estimate,
        contour,
    })
}

/// Result of a two-point trace with its independent reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointTrace {
    pub value: Complex64,
    pub reference: Option<Complex64>,
    pub residual: f64,
    /// Set when the value is zero identically rather than numerically.
    pub vanishing: bool,
    pub route: String,
    pub contour: String,
}

fn agree(value: Complex64, reference: Complex64) -> Result<f64> {
    let residual = relative_residual(value, reference);
    if residual > AGREEMENT_TOL {
        return Err(Error::Agreement { value, reference, residual });
    }
    Ok(residual)
}

/// ν₂ G(ζ)/√(2ħ) · Γ(1+ζ/2ħ)/Γ(3/2+ζ/2ħ) · Γ((γ+ħ+ζ)/γ)Γ((γ+ħ−ζ)/γ)/Γ((γ+2ħ)/γ).
pub fn type_i_two_point_closed_form(nu2: Sign, zeta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let (h, g) = (params.hbar(), params.gamma());
    let x = zeta / (2.0 * h);
    let log = log_gamma(1.0 + x)? - log_gamma(1.5 + x)? + log_gamma((g + h + zeta) / g)? + log_gamma((g + h - zeta) / g)?
        - log_gamma((g + 2.0 * h) / g)?;
    Ok(nu2.value() * g_fn(zeta, params, precision)? / (2.0 * h).sqrt() * log.exp())
}

/// The γ = 2ħ specialization: ν₂ G(ζ)/√(2ħ) · Γ(1+ζ/2ħ)Γ(3/2−ζ/2ħ).
pub fn type_i_two_point_free_form(nu2: Sign, zeta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let h = params.hbar();
    let x = zeta / (2.0 * h);
    Ok(nu2.value() * g_fn(zeta, params, precision)? / (2.0 * h).sqrt() * gamma_fn(1.0 + x)? * gamma_fn(1.5 - x)?)
}

/// ε₁ √(2ħ) G̃(β) Γ(1/2+β/2ħ)/Γ(β/2ħ) · Γ((β−ħ)/γ)Γ((γ−β−ħ)/γ)/(γ Γ((γ−2ħ)/γ)).
pub fn type_ii_two_point_closed_form(eps1: Sign, beta: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let (h, g) = (params.hbar(), params.gamma());
    let x = beta / (2.0 * h);
    let vanish = recip_gamma((g - 2.0 * h) / g);
    if vanish == real(0.0) {
        return Ok(real(0.0));
    }
    let value = eps1.value() * (2.0 * h).sqrt() * g_tilde_fn(beta, params, precision)?
        * gamma_or_nan(0.5 + x) * recip_gamma(x) * gamma_fn((beta - h) / g)? * gamma_fn((g - beta - h) / g)?
        / g * vanish;
    Ok(value)
}

/// Two-point trace of type I operators with components (ν₁, ν₂) at (ζ₁, ζ₂).
pub fn trace_type_i_2pt(
    nu2: Sign,
    nu1: Sign,
    zeta1: Complex64,
    zeta2: Complex64,
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<TwoPointTrace> {
    if nu1 == nu2 {
        return Ok(TwoPointTrace {
            value: real(0.0),
            reference: None,
            residual: 0.0,
            vanishing: true,
            route: "charge selection".into(),
            contour: "none".into(),
        });
    }
    let zeta = zeta1 - zeta2;
    let spec = TraceSpec::new(vec![], vec![(zeta1, nu1), (zeta2, nu2)], *params)?;
    if params.is_free_point() {
        let closed = type_i_two_point_free_form(nu2, zeta, params, precision)?;
        let split = free_point_routes_type_i(nu2, zeta1, zeta2, params, precision)?;
        let prefactor = trace_prefactor(&spec, precision)?;
        let arcs = prefactor * split.semicircle;
        let pv = prefactor * split.principal_value;
        let residual = agree(arcs, closed)?.max(agree(pv, closed)?).max(agree(arcs, pv)?);
        return Ok(TwoPointTrace {
            value: arcs,
            reference: Some(closed),
            residual,
            vanishing: false,
            route: "semicircles at infinity; principal value; closed form".into(),
            contour: split.contour,
        });
    }
    let closed = type_i_two_point_closed_form(nu2, zeta, params, precision)?;
    match general_trace(&spec, precision) {
        Ok(ev) => {
            let residual = agree(ev.value, closed)?;
            Ok(TwoPointTrace {
                value: ev.value,
                reference: Some(closed),
                residual,
                vanishing: false,
                route: "contour quadrature vs closed form".into(),
                contour: ev.contour,
            })
        }
        // pinched contour (e.g. ζ₁ − ζ₂ = −ħ): only the closed form is defined
        Err(Error::ContourConstruction(_)) | Err(Error::Separation { .. }) => Ok(TwoPointTrace {
                value: closed,
                reference: None,
                residual: 0.0,
                vanishing: false,
                route: "closed form (contour pinched)".into(),
                contour: "pinched".into(),
            }),
        Err(e) => Err(e),
    }
}

/// Values of the γ = 2ħ type I integral ∫_C du/2πi by two routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreePointRoutes {
    /// From the 1/u tails of the two one-sided pieces on arcs at infinity.
    pub semicircle: Complex64,
    /// Symmetric truncation of the line integral.
    pub principal_value: Complex64,
    /// ν₂ (π²/cos(πζ/2ħ)) (ζ − ħ)/2.
    pub closed_form: Complex64,
    pub contour: String,
}

/// The γ = 2ħ integrand P(u)/2ħ ∏ Γ(A_j)Γ(1/2 − A_j), A_j = (u − ζ_j)/2ħ,
/// written as f_left + f_right with
/// f_left = K P/2ħ ∏ Γ(A_j)/Γ(1/2 + A_j) (poles left of the line),
/// f_right = K P/2ħ ∏ Γ(1/2 − A_j)/Γ(1 − A_j) (poles right of the line),
/// K = π²/cos(π(ζ₁ − ζ₂)/2ħ).
pub struct SplitIntegrand {
    nu2: Sign,
    zeta1: Complex64,
    zeta2: Complex64,
    hbar: f64,
    k: Complex64,
}

impl SplitIntegrand {
    pub fn new(nu2: Sign, zeta1: Complex64, zeta2: Complex64, hbar: f64) -> Result<Self> {
        let c = cos_pi((zeta1 - zeta2) / (2.0 * hbar));
        if c.norm() < 1e-12 {
            return Err(Error::Pole { location: zeta1 - zeta2 });
        }
        Ok(Self { nu2, zeta1, zeta2, hbar, k: PI * PI / c })
    }

    fn poly(&self, u: Complex64) -> Complex64 {
        match self.nu2 {
            Sign::Plus => u - self.zeta1,
            Sign::Minus => u - self.zeta2 - self.hbar,
        }
    }

    fn a(&self, u: Complex64) -> [Complex64; 2] {
        [(u - self.zeta1) / (2.0 * self.hbar), (u - self.zeta2) / (2.0 * self.hbar)]
    }

    pub fn full(&self, u: Complex64) -> Complex64 {
        let a = self.a(u);
        self.poly(u) / (2.0 * self.hbar) * a.iter().map(|x| gamma_or_nan(*x) * gamma_or_nan(0.5 - x)).product::<Complex64>()
    }

    pub fn left_poles(&self, u: Complex64) -> Complex64 {
        let a = self.a(u);
        self.k * self.poly(u) / (2.0 * self.hbar)
            * a.iter().map(|x| gamma_or_nan(*x) * recip_gamma(0.5 + x)).product::<Complex64>()
    }

    pub fn right_poles(&self, u: Complex64) -> Complex64 {
        let a = self.a(u);
        self.k * self.poly(u) / (2.0 * self.hbar)
            * a.iter().map(|x| gamma_or_nan(0.5 - x) * recip_gamma(1.0 - x)).product::<Complex64>()
    }
}

pub fn free_point_routes_type_i(
    nu2: Sign,
    zeta1: Complex64,
    zeta2: Complex64,
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<FreePointRoutes> {
    if !params.is_free_point() {
        return Err(Error::InvalidParameter("the one-sided split needs γ = 2ħ".into()));
    }
    let h = params.hbar();
    let split = SplitIntegrand::new(nu2, zeta1, zeta2, h)?;
    let line = type_i_contour(&[zeta1, zeta2], params, &ContourOptions::default(), precision.max_ladder_terms)?;
    let center = real(line.real_part());
    let radius = 20.0 * [1.0, h, zeta1.norm(), zeta2.norm()].iter().cloned().fold(0.0, f64::max);
    let left = |u: Complex64| split.left_poles(u);
    let right = |u: Complex64| split.right_poles(u);
    let arcs = downward_line_by_arcs(&left, &right, center, radius)?;
    let full = |u: Complex64| split.full(u);
    let pv = principal_value_vertical(&full, &line, 10.0 * (1.0 + h), precision)?;
    let zeta = zeta1 - zeta2;
    let closed = nu2.value() * split.k * (zeta - h) / 2.0;
    Ok(FreePointRoutes {
        semicircle: arcs.value,
        principal_value: pv.value,
        closed_form: closed,
        contour: format!("line Re u = {:.6} downward; arcs at radius {radius}..{}", line.real_part(), 8.0 * radius),
    })
}

/// Two-point trace of type II operators with components (ε₁, ε₂) at (β₁, β₂).
pub fn trace_type_ii_2pt(
    eps2: Sign,
    eps1: Sign,
    beta1: Complex64,
    beta2: Complex64,
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<TwoPointTrace> {
    if eps1 == eps2 {
        return Ok(TwoPointTrace {
            value: real(0.0),
            reference: None,
            residual: 0.0,
            vanishing: true,
            route: "charge selection".into(),
            contour: "none".into(),
        });
    }
    let beta = beta1 - beta2;
    if params.is_free_point() {
        return Ok(TwoPointTrace {
            value: real(0.0),
            reference: None,
            residual: 0.0,
            vanishing: true,
            route: "identically zero at γ = 2ħ".into(),
            contour: "none".into(),
        });
    }
    let closed = type_ii_two_point_closed_form(eps1, beta, params, precision)?;
    let spec = TraceSpec::new(vec![(beta1, eps1), (beta2, eps2)], vec![], *params)?;
    let ev = general_trace(&spec, precision)?;
    let residual = agree(ev.value, closed)?;
    Ok(TwoPointTrace {
        value: ev.value,
        reference: Some(closed),
        residual,
        vanishing: false,
        route: "contour quadrature vs closed form".into(),
        contour: ev.contour,
    })
}

/// The numeric type II two-point trace, with no closed-form assertion.
pub fn type_ii_two_point_numeric(
    eps2: Sign,
    eps1: Sign,
    beta1: Complex64,
    beta2: Complex64,
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<TraceEvaluation> {
    let spec = TraceSpec::new(vec![(beta1, eps1), (beta2, eps2)], vec![], *params)?;
    general_trace(&spec, precision)
}

/// Residue of the numeric type II two-point trace at β₁ − β₂ = ħ, from a
/// circle of numeric traces around that point.
pub fn type_ii_residue_at_hbar(eps1: Sign, beta2: Complex64, params: &DeformParams, precision: &PrecisionConfig) -> Result<Complex64> {
    let h = params.hbar();
    let radius = 0.2 * h.min((params.gamma().re - 2.0 * h).abs().max(0.25 * h));
    let nodes = 32;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
        let beta1 = beta2 + h + e * radius;
        let ev = type_ii_two_point_numeric(eps1.flip(), eps1, beta1, beta2, params, precision)?;
        acc += ev.value * e * radius;
    }
    Ok(acc / nodes as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub integral: Complex64,
    pub abs_scale: f64,
    /// |integral| / abs_scale.
    pub residual: f64,
    pub error_estimate: f64,
    /// Numerically measured power of v at infinity of the difference
    /// integrand (polynomial times Gamma ratio); −2 means no 1/v term.
    pub tail_order: f64,
}

/// Power-law exponent of f(v)·∏_j Γ((β_j−v)/2ħ)/Γ((3ħ+β_j−v)/2ħ) along the
/// imaginary direction, f of degree 3n − 2.
pub fn difference_tail_order(beta: &[Complex64], params: &DeformParams) -> f64 {
    let h = params.hbar();
    let n = beta.len() / 2;
    let eval = |r: f64| -> f64 {
        let v = Complex64::new(0.0, r);
        let mut log = (3.0 * n as f64 - 2.0) * v.norm().ln();
        for b in beta {
            log += (log_gamma((b - v) / (2.0 * h)).unwrap() - log_gamma((3.0 * h + b - v) / (2.0 * h)).unwrap()).re;
        }
        log
    };
    let (r1, r2) = (1e3, 2e3);
    (eval(r2) - eval(r1)) / (r2 / r1).ln()
}

/// The v-integrals of a 2n-point type II trace at γ = 2ħ, measured against
/// their absolute scale.
pub fn trace_type_ii_multipoint_vanishing(
    beta: &[Complex64],
    eps: &[Sign],
    params: &DeformParams,
    precision: &PrecisionConfig,
) -> Result<VanishingReport> {
    if !params.is_free_point() {
        return Err(Error::InvalidParameter("vanishing holds at γ = 2ħ".into()));
    }
    if beta.len() != eps.len() || !(beta.len() == 2 || beta.len() == 4) {
        return Err(Error::Unsupported("2 or 4 type II points".into()));
    }
    let spec = TraceSpec::new(beta.iter().copied().zip(eps.iter().copied()).collect(), vec![], *params)?;
    let shape = spec.shape()?;
    let idx = spec.index_sets();
    let c = type_ii_contour(beta, params, &ContourOptions::default(), precision.max_ladder_terms)?;
    let (spec, idx) = (&spec, &idx);
    let s = |k: usize| move |v: Complex64| type_ii_single(v, k, spec, idx);
    let (integral, abs_scale, error_estimate) = if shape.n == 1 {
        let (v, a) = integrate_type_ii_1d(&s(0), &c, precision)?;
        (v, a, 0.0)
    } else {
        let cross = |w: Complex64| type_ii_coupling(w, params);
        let growth = 2.0 * PI / params.gamma().norm();
        let t = tensor_integral_2d(&s(0), &s(1), &cross, &c.line, &c.excisions, growth, precision)?;
        (t.value, t.abs_scale, t.error_estimate)
    };
    Ok(VanishingReport {
        integral,
        abs_scale,
        residual: integral.norm() / abs_scale,
        error_estimate,
        tail_order: difference_tail_order(beta, params),
    })
}

/// Correlation-type trace with only type I operators (N = n = 0, M = 2m).
pub fn correlation_type_i(
    zeta: &[Complex64],
    nu: &[Sign],
    params: &DeformParams,
    precision: &PrecisionConfig,
    options: &ContourOptions,
) -> Result<TraceEvaluation> {
    if zeta.len() != nu.len() || !(zeta.len() == 2 || zeta.len() == 4) {
        return Err(Error::Unsupported("2 or 4 type I points".into()));
    }
    let spec = TraceSpec::new(vec![], zeta.iter().copied().zip(nu.iter().copied()).collect(), *params)?;
    general_trace_with(&spec, precision, options)
}
