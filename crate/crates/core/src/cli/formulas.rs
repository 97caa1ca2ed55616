//! Formula ids exposed to `eval`, `table` and the verification suites.

use super::{format_complex, parse_complex, parse_sign, CliError, CliResult, Outcome, ParamMap};
use crate::barnes_functions::{g_evaluate, g_spec, integral_domain_ok, zeta_bar_fn, zeta_fn, zeta_tilde_fn, GKind, Route};
use crate::contour_quadrature::{mellin_barnes_4gamma, principal_value_vertical, Orientation, VerticalLine};
use crate::error::Error;
use crate::gauss_manin::{
    classical_identity_residual, compare_mixed_with_form_factor, elliptic_period, gm_connection, gm_connection_printed,
    gm_identity_n2, gm_residual, third_point_relation_residual, form_factor_integral, total_difference_identity,
    trace_mixed_1_3, trace_mixed_2_2n, QuadraticKernel, Segment,
};
use crate::rmatrix::{check_crossing, check_unitarity, check_yang_baxter, r_scalar};
use crate::special_core::{gamma_fn, is_gamma_pole, real, relative_residual, sin_pi, DeformParams, PrecisionConfig};
use crate::trace_evaluators::{
    correlation_type_i, general_trace, trace_type_i_2pt, trace_type_ii_2pt, trace_type_ii_multipoint_vanishing,
    type_ii_residue_at_hbar, ContourOptions, Sign, TraceSpec, TwoPointTrace,
};
use crate::vertex_trace_engine::{reduce_product, trace_ratio_integral, trace_ratio_product, FieldFactor, FieldKind, OperatorProduct};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which deformation parameters a formula reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deform {
    None,
    Hbar,
    Both,
}

pub struct Formula {
    pub id: &'static str,
    pub about: &'static str,
    /// "name" required, "name=default", "name?" optional.
    pub params: &'static [&'static str],
    pub deform: Deform,
    eval: fn(&Inputs) -> CliResult<Outcome>,
}

impl Formula {
    /// Checks names and fills defaults, including ħ = 1 and γ = 2.
    pub fn complete(&self, given: &ParamMap) -> CliResult<ParamMap> {
        let mut out = ParamMap::new();
        let allowed = |name: &str| -> bool {
            match name {
                "hbar" => self.deform != Deform::None,
                "gamma" => self.deform == Deform::Both,
                _ => self.params.iter().any(|p| p.split(['=', '?']).next() == Some(name)),
            }
        };
        for (k, v) in given {
            if !allowed(k) {
                return Err(CliError::UnexpectedParam { formula: self.id.into(), name: k.clone() });
            }
            out.insert(k.clone(), v.clone());
        }
        if self.deform != Deform::None {
            out.entry("hbar".into()).or_insert_with(|| "1".into());
        }
        if self.deform == Deform::Both {
            out.entry("gamma".into()).or_insert_with(|| "2".into());
        }
        for p in self.params {
            if let Some((name, default)) = p.split_once('=') {
                out.entry(name.into()).or_insert_with(|| default.into());
            } else if !p.ends_with('?') && !out.contains_key(*p) {
                return Err(CliError::MissingParam { formula: self.id.into(), name: p.to_string() });
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self, params: &ParamMap, precision: &PrecisionConfig) -> CliResult<Outcome> {
        (self.eval)(&Inputs { formula: self.id, params, precision })
    }
}

pub struct Inputs<'a> {
    formula: &'static str,
    params: &'a ParamMap,
    precision: &'a PrecisionConfig,
}

impl Inputs<'_> {
    fn raw(&self, name: &str) -> CliResult<&str> {
        self.params
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| CliError::MissingParam { formula: self.formula.into(), name: name.into() })
    }

    fn bad(&self, name: &str, reason: String) -> CliError {
        CliError::BadValue { name: name.into(), value: self.params.get(name).cloned().unwrap_or_default(), reason }
    }

    fn complex(&self, name: &str) -> CliResult<Complex64> {
        parse_complex(self.raw(name)?).map_err(|r| self.bad(name, r))
    }

    fn real(&self, name: &str) -> CliResult<f64> {
        let z = self.complex(name)?;
        if z.im != 0.0 {
            return Err(self.bad(name, "must be real".into()));
        }
        Ok(z.re)
    }

    fn sign(&self, name: &str) -> CliResult<Sign> {
        parse_sign(self.raw(name)?).map_err(|r| self.bad(name, r))
    }

    fn sign_or_flip(&self, name: &str, other: Sign) -> CliResult<Sign> {
        if self.params.contains_key(name) {
            self.sign(name)
        } else {
            Ok(other.flip())
        }
    }

    fn index(&self, name: &str) -> CliResult<usize> {
        self.raw(name)?.parse::<usize>().map_err(|e| self.bad(name, e.to_string()))
    }

    fn choice<'c>(&self, name: &str, options: &[&'c str]) -> CliResult<&'c str> {
        let v = self.raw(name)?;
        options
            .iter()
            .find(|o| **o == v)
            .copied()
            .ok_or_else(|| self.bad(name, format!("expected one of {}", options.join(", "))))
    }

    /// prefix1, prefix2, … up to the first absent index.
    fn complex_list(&self, prefix: &str) -> CliResult<Vec<Complex64>> {
        let mut out = Vec::new();
        while self.params.contains_key(&format!("{prefix}{}", out.len() + 1)) {
            out.push(self.complex(&format!("{prefix}{}", out.len() + 1))?);
        }
        Ok(out)
    }

    fn sign_list(&self, prefix: &str, count: usize) -> CliResult<Vec<Sign>> {
        (1..=count).map(|k| self.sign(&format!("{prefix}{k}"))).collect()
    }

    fn triple(&self) -> CliResult<[Complex64; 3]> {
        Ok([self.complex("beta1")?, self.complex("beta2")?, self.complex("beta3")?])
    }

    fn quadruple(&self) -> CliResult<[Complex64; 4]> {
        Ok([self.complex("beta1")?, self.complex("beta2")?, self.complex("beta3")?, self.complex("beta4")?])
    }

    fn real_triple(&self) -> CliResult<[f64; 3]> {
        Ok([self.real("beta1")?, self.real("beta2")?, self.real("beta3")?])
    }

    fn hbar(&self) -> CliResult<f64> {
        self.real("hbar")
    }

    fn deform(&self) -> CliResult<DeformParams> {
        let h = self.hbar()?;
        let g = if self.params.contains_key("gamma") { self.complex("gamma")? } else { real(2.0) };
        DeformParams::new(h, g).map_err(|e| self.domain(e))
    }

    fn domain(&self, source: Error) -> CliError {
        CliError::Domain { context: self.formula.into(), source }
    }

    fn kind(&self) -> CliResult<GKind> {
        Ok(match self.choice("kind", &["standard", "tilde", "bar"])? {
            "standard" => GKind::Standard,
            "tilde" => GKind::Tilde,
            _ => GKind::Bar,
        })
    }
}

trait Context<T> {
    fn ctx(self, inputs: &Inputs) -> CliResult<T>;
}

impl<T> Context<T> for crate::error::Result<T> {
    fn ctx(self, inputs: &Inputs) -> CliResult<T> {
        self.map_err(|e| inputs.domain(e))
    }
}

fn kind_name(kind: GKind) -> &'static str {
    match kind {
        GKind::Standard => "G",
        GKind::Tilde => "G~",
        GKind::Bar => "Gbar",
    }
}

fn g_value(inp: &Inputs, kind: GKind) -> CliResult<Outcome> {
    let z = inp.complex("z")?;
    let params = inp.deform()?;
    let p = inp.precision;
    let product = g_evaluate(kind, z, &params, p, Route::Product).ctx(inp)?;
    if integral_domain_ok(&g_spec(kind, z, &params).ctx(inp)?) {
        let integral = g_evaluate(kind, z, &params, p, Route::Integral).ctx(inp)?;
        Ok(Outcome::compare(product, integral, 1e-6).note(format!("{}: double product vs exponential integral", kind_name(kind))))
    } else {
        Ok(Outcome::value(product).note(format!("{}: double product (integral route outside its domain)", kind_name(kind))))
    }
}

fn g_auto(inp: &Inputs, kind: GKind, z: Complex64, params: &DeformParams) -> CliResult<Complex64> {
    g_evaluate(kind, z, params, inp.precision, Route::Auto).ctx(inp)
}

/// A two-point trace record; a failed route agreement becomes a failed record.
fn two_point(inp: &Inputs, result: crate::error::Result<TwoPointTrace>) -> CliResult<Outcome> {
    match result {
        Ok(t) => {
            let mut o = match t.reference {
                Some(r) => Outcome::compare(t.value, r, 1e-6),
                None => Outcome::value(t.value),
            };
            o.residual = t.residual;
            Ok(o.contour(t.contour).note(if t.vanishing { format!("{} (vanishing)", t.route) } else { t.route }))
        }
        Err(Error::Agreement { value, reference, residual }) => {
            let mut o = Outcome::compare(value, reference, 1e-6);
            o.residual = residual;
            Ok(o.note("routes disagree"))
        }
        Err(e) => Err(inp.domain(e)),
    }
}

fn parse_factors(inp: &Inputs) -> CliResult<OperatorProduct> {
    let text = inp.raw("factors")?;
    let mut factors = Vec::new();
    for item in text.split(',') {
        let parts: Vec<&str> = item.trim().split(':').collect();
        if parts.len() != 3 {
            return Err(inp.bad("factors", format!("expected kind:argument:power, got {item:?}")));
        }
        let kind = match parts[0] {
            "phi_minus" => FieldKind::PhiMinus,
            "phi_plus" => FieldKind::PhiPlus,
            "mu_minus" => FieldKind::MuMinus,
            "eta_plus" => FieldKind::EtaPlus,
            other => return Err(inp.bad("factors", format!("unknown field {other:?}"))),
        };
        let arg = parse_complex(parts[1]).map_err(|r| inp.bad("factors", r))?;
        let power = parts[2].parse::<i32>().map_err(|e| inp.bad("factors", e.to_string()))?;
        factors.push(FieldFactor::new(kind, arg, power).ctx(inp)?);
    }
    Ok(OperatorProduct::new(factors))
}

/// "β:±,β:±" into points with signs.
fn parse_points(inp: &Inputs, name: &str) -> CliResult<Vec<(Complex64, Sign)>> {
    let Some(text) = inp.params.get(name) else {
        return Ok(Vec::new());
    };
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|item| {
            let (z, s) = item
                .trim()
                .rsplit_once(':')
                .ok_or_else(|| inp.bad(name, format!("expected value:sign, got {item:?}")))?;
            Ok((parse_complex(z).map_err(|r| inp.bad(name, r))?, parse_sign(s).map_err(|r| inp.bad(name, r))?))
        })
        .collect()
}

fn segment(inp: &Inputs) -> CliResult<Segment> {
    Ok(if inp.choice("segment", &["lower", "upper"])? == "lower" { Segment::Lower } else { Segment::Upper })
}

pub static FORMULAS: &[Formula] = &[
    Formula {
        id: "gamma",
        about: "Γ(z), compared with the reflection formula, or Γ(z+1)/z at positive integers",
        params: &["z"],
        deform: Deform::None,
        eval: |inp| {
            let z = inp.complex("z")?;
            let value = gamma_fn(z).ctx(inp)?;
            let reference = if is_gamma_pole(1.0 - z) {
                gamma_fn(z + 1.0).ctx(inp)? / z
            } else {
                PI / (sin_pi(z) * gamma_fn(1.0 - z).ctx(inp)?)
            };
            Ok(Outcome::compare(value, reference, 1e-12))
        },
    },
    Formula { id: "g", about: "G(z); product vs integral where both apply", params: &["z"], deform: Deform::Both, eval: |inp| g_value(inp, GKind::Standard) },
    Formula { id: "g_tilde", about: "G̃(z); product vs integral where both apply", params: &["z"], deform: Deform::Both, eval: |inp| g_value(inp, GKind::Tilde) },
    Formula { id: "g_bar", about: "Ḡ(z); product vs integral where both apply", params: &["z"], deform: Deform::Both, eval: |inp| g_value(inp, GKind::Bar) },
    Formula {
        id: "g_even",
        about: "G(z) = G(−z) for kind standard|tilde",
        params: &["kind", "z"],
        deform: Deform::Both,
        eval: |inp| {
            let (kind, z, params) = (inp.kind()?, inp.complex("z")?, inp.deform()?);
            Ok(Outcome::compare(g_auto(inp, kind, z, &params)?, g_auto(inp, kind, -z, &params)?, 1e-8))
        },
    },
    Formula {
        id: "g_normalization",
        about: "G(ħ) = G̃(ħ) = 1 and Ḡ(0) = 1",
        params: &["kind"],
        deform: Deform::Both,
        eval: |inp| {
            let (kind, params) = (inp.kind()?, inp.deform()?);
            let at = if kind == GKind::Bar { real(0.0) } else { real(params.hbar()) };
            Ok(Outcome::compare(g_auto(inp, kind, at, &params)?, real(1.0), 1e-8))
        },
    },
    Formula {
        id: "g_product_identity",
        about: "G(z)G̃(z) against the printed (z/ħ)sin(πħ/γ)/sin(πz/γ)",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| {
            let (z, params) = (inp.complex("z")?, inp.deform()?);
            let (h, g) = (params.hbar(), params.gamma());
            let lhs = g_auto(inp, GKind::Standard, z, &params)? * g_auto(inp, GKind::Tilde, z, &params)?;
            Ok(Outcome::compare(lhs, z / h * sin_pi(h / g) / sin_pi(z / g), 1e-8))
        },
    },
    Formula {
        id: "g_product_identity_inverted",
        about: "G(z)G̃(z) against (ħ/z)sin(πz/γ)/sin(πħ/γ), the form the products satisfy",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| {
            let (z, params) = (inp.complex("z")?, inp.deform()?);
            let (h, g) = (params.hbar(), params.gamma());
            let lhs = g_auto(inp, GKind::Standard, z, &params)? * g_auto(inp, GKind::Tilde, z, &params)?;
            Ok(Outcome::compare(lhs, h / z * sin_pi(z / g) / sin_pi(h / g), 1e-8))
        },
    },
    Formula {
        id: "g_bar_reflection",
        about: "Ḡ(z)Ḡ(−z) = (πz/γ)/sin(πz/γ)",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| {
            let (z, params) = (inp.complex("z")?, inp.deform()?);
            let g = params.gamma();
            let lhs = g_auto(inp, GKind::Bar, z, &params)? * g_auto(inp, GKind::Bar, -z, &params)?;
            Ok(Outcome::compare(lhs, PI * z / g / sin_pi(z / g), 1e-8))
        },
    },
    Formula {
        id: "g_bar_shift",
        about: "Ḡ(z)Ḡ(z−ħ) = (πz/γ)/sin(πz/γ)",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| {
            let (z, params) = (inp.complex("z")?, inp.deform()?);
            let g = params.gamma();
            let lhs = g_auto(inp, GKind::Bar, z, &params)? * g_auto(inp, GKind::Bar, z - params.hbar(), &params)?;
            Ok(Outcome::compare(lhs, PI * z / g / sin_pi(z / g), 1e-8))
        },
    },
    Formula {
        id: "zeta_fn",
        about: "Γ(1+z/2ħ)/Γ(1/2+z/2ħ) G(z)/G(0)^{1/2}",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| Ok(Outcome::value(zeta_fn(inp.complex("z")?, &inp.deform()?, inp.precision).ctx(inp)?)),
    },
    Formula {
        id: "zeta_tilde_fn",
        about: "Γ(1/2+z/2ħ)/Γ(z/2ħ) G̃(z)/G̃(0)^{1/2}",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| Ok(Outcome::value(zeta_tilde_fn(inp.complex("z")?, &inp.deform()?, inp.precision).ctx(inp)?)),
    },
    Formula {
        id: "zeta_bar_fn",
        about: "Γ(1/2+z/2ħ)/Γ(1+z/2ħ) Ḡ(z)",
        params: &["z"],
        deform: Deform::Both,
        eval: |inp| Ok(Outcome::value(zeta_bar_fn(inp.complex("z")?, &inp.deform()?, inp.precision).ctx(inp)?)),
    },
    Formula {
        id: "r_scalar",
        about: "scalar factor of the R-matrix",
        params: &["z"],
        deform: Deform::Hbar,
        eval: |inp| Ok(Outcome::value(r_scalar(inp.complex("z")?, &inp.deform()?).ctx(inp)?)),
    },
    Formula {
        id: "unitarity",
        about: "max |R(z)R(−z) − I|",
        params: &["z"],
        deform: Deform::Hbar,
        eval: |inp| Ok(Outcome::check(check_unitarity(inp.complex("z")?, &inp.deform()?).ctx(inp)?, 1e-10)),
    },
    Formula {
        id: "crossing",
        about: "max |(C⊗1)R(z)(C⊗1) − R^{t1}(−z−ħ)|",
        params: &["z"],
        deform: Deform::Hbar,
        eval: |inp| Ok(Outcome::check(check_crossing(inp.complex("z")?, &inp.deform()?).ctx(inp)?, 1e-10)),
    },
    Formula {
        id: "yang_baxter",
        about: "Yang–Baxter residual at spectral parameters z1, z2",
        params: &["z1", "z2"],
        deform: Deform::Hbar,
        eval: |inp| {
            let r = check_yang_baxter(inp.complex("z1")?, inp.complex("z2")?, &inp.deform()?).ctx(inp)?;
            Ok(Outcome::check(r, 1e-10))
        },
    },
    Formula {
        id: "trace_ratio",
        about: "trace ratio of a neutral field product, double product vs integral; factors = kind:arg:power,…",
        params: &["factors"],
        deform: Deform::Both,
        eval: |inp| {
            let params = inp.deform()?;
            let product = reduce_product(&parse_factors(inp)?, &params);
            let a = trace_ratio_product(&product, &params, inp.precision).ctx(inp)?;
            let b = trace_ratio_integral(&product, &params, inp.precision).ctx(inp)?;
            Ok(Outcome::compare(a, b, 1e-8))
        },
    },
    Formula {
        id: "mellin_barnes",
        about: "∫Γ(a+s)Γ(b+s)Γ(c−s)Γ(d−s)ds/2πi vs the closer of the two closed forms",
        params: &["a", "b", "c", "d"],
        deform: Deform::None,
        eval: |inp| {
            let mb = mellin_barnes_4gamma(inp.complex("a")?, inp.complex("b")?, inp.complex("c")?, inp.complex("d")?, inp.precision)
                .ctx(inp)?;
            let (variant, _) = mb.confirmed_variant();
            let reference = if variant == "standard" { mb.closed_standard } else { mb.closed_shifted };
            let other = if variant == "standard" { mb.closed_shifted } else { mb.closed_standard };
            Ok(Outcome::compare(mb.numeric, reference, 1e-8).contour("vertical line between the ladders").note(format!(
                "confirmed denominator: {}; other variant residual {:.3e}",
                if variant == "standard" { "Γ(a+b+c+d)" } else { "Γ(1+a+b+c+d)" },
                relative_residual(mb.numeric, other)
            )))
        },
    },
    Formula {
        id: "principal_value_reciprocal",
        about: "symmetric truncation of ∫dv/(2πi v) upward along Re v = 1, which is 1/2",
        params: &[],
        deform: Deform::None,
        eval: |inp| {
            let line = VerticalLine::unchecked(1.0, Orientation::Up, 0.5);
            let pv = principal_value_vertical(&|v: Complex64| v.inv(), &line, 40.0, inp.precision).ctx(inp)?;
            Ok(Outcome::compare(pv.value, real(0.5), 1e-6).contour("Re v = 1, upward"))
        },
    },
    Formula {
        id: "trace_type_i_2pt",
        about: "two-point type I trace, contour vs closed form (three routes at γ = 2ħ)",
        params: &["nu2", "nu1?", "zeta1", "zeta2=0"],
        deform: Deform::Both,
        eval: |inp| {
            let nu2 = inp.sign("nu2")?;
            let nu1 = inp.sign_or_flip("nu1", nu2)?;
            let r = trace_type_i_2pt(nu2, nu1, inp.complex("zeta1")?, inp.complex("zeta2")?, &inp.deform()?, inp.precision);
            two_point(inp, r)
        },
    },
    Formula {
        id: "type_i_normalization",
        about: "two-point type I trace at ζ1 − ζ2 = −ħ against ν2 √(π/2ħ)",
        params: &["nu2"],
        deform: Deform::Both,
        eval: |inp| {
            let nu2 = inp.sign("nu2")?;
            let params = inp.deform()?;
            let h = params.hbar();
            let t = trace_type_i_2pt(nu2, nu2.flip(), real(-h), real(0.0), &params, inp.precision).ctx(inp)?;
            let expect = nu2.value() * (PI / (2.0 * h)).sqrt();
            Ok(Outcome::compare(t.value, real(expect), 1e-10).note(t.route))
        },
    },
    Formula {
        id: "trace_type_ii_2pt",
        about: "two-point type II trace, contour vs closed form; identically zero at γ = 2ħ",
        params: &["eps1", "eps2?", "beta1", "beta2=0"],
        deform: Deform::Both,
        eval: |inp| {
            let eps1 = inp.sign("eps1")?;
            let eps2 = inp.sign_or_flip("eps2", eps1)?;
            let r = trace_type_ii_2pt(eps2, eps1, inp.complex("beta1")?, inp.complex("beta2")?, &inp.deform()?, inp.precision);
            two_point(inp, r)
        },
    },
    Formula {
        id: "type_ii_residue",
        about: "residue of the type II two-point trace at β1 − β2 = ħ against ε1 √(2ħ/π)",
        params: &["eps1", "beta2=0"],
        deform: Deform::Both,
        eval: |inp| {
            let eps1 = inp.sign("eps1")?;
            let params = inp.deform()?;
            let r = type_ii_residue_at_hbar(eps1, inp.complex("beta2")?, &params, inp.precision).ctx(inp)?;
            Ok(Outcome::compare(r, real(eps1.value() * (2.0 * params.hbar() / PI).sqrt()), 1e-6).contour("circle of 32 nodes"))
        },
    },
    Formula {
        id: "type_ii_vanishing",
        about: "type II 2- or 4-point integral at γ = 2ħ relative to ∫|integrand|",
        params: &["beta1", "beta2", "beta3?", "beta4?", "eps1", "eps2", "eps3?", "eps4?"],
        deform: Deform::Both,
        eval: |inp| {
            let beta = inp.complex_list("beta")?;
            let eps = inp.sign_list("eps", beta.len())?;
            let r = trace_type_ii_multipoint_vanishing(&beta, &eps, &inp.deform()?, inp.precision).ctx(inp)?;
            let tol = if beta.len() == 2 { 1e-8 } else { 1e-6 };
            let mut o = Outcome::check(r.residual, tol);
            o.value = r.integral;
            Ok(o.note(format!("scale {:.6e}, error estimate {:.3e}, tail order {:.3}", r.abs_scale, r.error_estimate, r.tail_order)))
        },
    },
    Formula {
        id: "type_i_shift_invariance",
        about: "type I 2- or 4-point trace on two different admissible contours",
        params: &["zeta1", "zeta2", "zeta3?", "zeta4?", "nu1", "nu2", "nu3?", "nu4?", "gap_a=0.35", "gap_b=0.65"],
        deform: Deform::Both,
        eval: |inp| {
            let zeta = inp.complex_list("zeta")?;
            let nu = inp.sign_list("nu", zeta.len())?;
            let params = inp.deform()?;
            let run = |gap: f64| correlation_type_i(&zeta, &nu, &params, inp.precision, &ContourOptions { gap_fraction: gap });
            let a = run(inp.real("gap_a")?).ctx(inp)?;
            let b = run(inp.real("gap_b")?).ctx(inp)?;
            Ok(Outcome::compare(a.value, b.value, 1e-6).contour(a.contour))
        },
    },
    Formula {
        id: "general_trace",
        about: "general trace of type II points ii = \"β:±,…\" and type I points i = \"ζ:±,…\"",
        params: &["ii?", "i?"],
        deform: Deform::Both,
        eval: |inp| {
            let spec = TraceSpec::new(parse_points(inp, "ii")?, parse_points(inp, "i")?, inp.deform()?).ctx(inp)?;
            let ev = general_trace(&spec, inp.precision).ctx(inp)?;
            let mut o = Outcome::value(ev.value);
            o.residual = if ev.abs_scale > 0.0 { ev.error_estimate / ev.abs_scale } else { 0.0 };
            o.tolerance = 1e-6;
            Ok(o.contour(ev.contour).note("residual: error estimate relative to ∫|integrand|"))
        },
    },
    Formula {
        id: "total_difference_identity",
        about: "difference identity on C′ for the m-th point (m = 1, 2, 3) and exponent sign",
        params: &["m", "sign", "beta1", "beta2", "beta3"],
        deform: Deform::Hbar,
        eval: |inp| {
            let c = total_difference_identity(inp.index("m")?, inp.sign("sign")?, inp.triple()?, inp.hbar()?, inp.precision, &ContourOptions::default())
                .ctx(inp)?;
            let mut o = Outcome::compare(c.lhs, c.rhs, 1e-8);
            o.residual = c.residual;
            Ok(o)
        },
    },
    Formula {
        id: "gauss_manin_connection",
        about: "difference system F(β3+2ħ) = M F(β3) with the connection the periods satisfy",
        params: &["k", "beta1", "beta2", "beta3"],
        deform: Deform::Hbar,
        eval: |inp| {
            let (beta, h) = (inp.triple()?, inp.hbar()?);
            let r = gm_residual(beta, inp.sign("k")?, h, &gm_connection(beta, h), inp.precision).ctx(inp)?;
            Ok(Outcome::check(r[0].max(r[1]), 1e-8).note(format!("p = 0: {:.3e}, p = 1: {:.3e}", r[0], r[1])))
        },
    },
    Formula {
        id: "gauss_manin_connection_printed",
        about: "difference system with the connection matrix as printed",
        params: &["k", "beta1", "beta2", "beta3"],
        deform: Deform::Hbar,
        eval: |inp| {
            let (beta, h) = (inp.triple()?, inp.hbar()?);
            let r = gm_residual(beta, inp.sign("k")?, h, &gm_connection_printed(beta, h), inp.precision).ctx(inp)?;
            Ok(Outcome::check(r[0].max(r[1]), 1e-8).note(format!("p = 0: {:.3e}, p = 1: {:.3e}", r[0], r[1])))
        },
    },
    Formula {
        id: "gauss_manin_four_point",
        about: "four-point difference identity with the quadratic kernel kernel = derived|printed",
        params: &["sign", "beta1", "beta2", "beta3", "beta4", "kernel=derived"],
        deform: Deform::Hbar,
        eval: |inp| {
            let kernel = if inp.choice("kernel", &["derived", "printed"])? == "derived" {
                QuadraticKernel::Derived
            } else {
                QuadraticKernel::Printed
            };
            let c = gm_identity_n2(inp.quadruple()?, inp.sign("sign")?, inp.hbar()?, kernel, inp.precision).ctx(inp)?;
            let mut o = Outcome::compare(c.lhs, c.rhs, 1e-6);
            o.residual = c.residual;
            Ok(o)
        },
    },
    Formula {
        id: "third_point_relation",
        about: "two-moment relation at the third point, as printed",
        params: &["beta1", "beta2", "beta3"],
        deform: Deform::Hbar,
        eval: |inp| Ok(Outcome::check(third_point_relation_residual(inp.triple()?, inp.hbar()?, 1.0, inp.precision).ctx(inp)?, 1e-8)),
    },
    Formula {
        id: "elliptic_period",
        about: "∫ v^p dv/√|∏(v−βj)| over segment lower|upper of sorted real β",
        params: &["p", "beta1", "beta2", "beta3", "segment=lower"],
        deform: Deform::None,
        eval: |inp| {
            let p = inp.index("p")?;
            let p = u8::try_from(p).map_err(|_| inp.bad("p", "must be 0 or 1".into()))?;
            Ok(Outcome::value(real(elliptic_period(p, inp.real_triple()?, segment(inp)?, inp.precision).ctx(inp)?)))
        },
    },
    Formula {
        id: "classical_identity",
        about: "classical limit of the difference identity on the lower segment",
        params: &["beta1", "beta2", "beta3"],
        deform: Deform::None,
        eval: |inp| Ok(Outcome::check(classical_identity_residual(inp.real_triple()?, inp.precision).ctx(inp)?, 1e-8)),
    },
    Formula {
        id: "mixed_trace_three",
        about: "three type II + one type I trace at γ = 2ħ, contour vs the printed closed form",
        params: &["beta1", "beta2", "beta3", "zeta"],
        deform: Deform::Both,
        eval: |inp| {
            let t = trace_mixed_1_3(inp.triple()?, inp.complex("zeta")?, &inp.deform()?, inp.precision).ctx(inp)?;
            let mut o = Outcome::compare(t.numeric, t.closed_form, 1e-5);
            o.residual = t.residual;
            Ok(o.contour(t.contour).note(format!("reduction to the C′ moments: {:.3e}", t.reduction_residual)))
        },
    },
    Formula {
        id: "mixed_trace_pair",
        about: "2n type II + two type I trace at γ = 2ħ (n = 1, 2)",
        params: &["beta1", "beta2", "beta3?", "beta4?", "eps1", "eps2", "eps3?", "eps4?", "zeta"],
        deform: Deform::Both,
        eval: |inp| {
            let beta = inp.complex_list("beta")?;
            let eps = inp.sign_list("eps", beta.len())?;
            let m = trace_mixed_2_2n(&beta, &eps, inp.complex("zeta")?, &inp.deform()?, inp.precision).ctx(inp)?;
            let mut o = Outcome::value(m.value);
            let scale = m.integral.value.norm().max(f64::MIN_POSITIVE);
            o.residual = (m.integral.extrapolation_error + m.integral.discretization_error) / scale;
            o.tolerance = 1e-6;
            Ok(o.note(format!("v-integral {} (residual: quadrature error estimate)", format_complex(m.integral.value))))
        },
    },
    Formula {
        id: "mixed_pair_integral",
        about: "v-integral of the two-point mixed trace against π",
        params: &["beta1", "beta2", "eps1", "eps2", "zeta"],
        deform: Deform::Both,
        eval: |inp| {
            let beta = [inp.complex("beta1")?, inp.complex("beta2")?];
            let eps = [inp.sign("eps1")?, inp.sign("eps2")?];
            let m = trace_mixed_2_2n(&beta, &eps, inp.complex("zeta")?, &inp.deform()?, inp.precision).ctx(inp)?;
            Ok(Outcome::compare(m.integral.value, real(PI), 1e-9))
        },
    },
    Formula {
        id: "form_factor",
        about: "single-integral four-point form factor at γ = 2ħ",
        params: &["beta1", "beta2", "beta3", "beta4"],
        deform: Deform::Both,
        eval: |inp| Ok(Outcome::value(form_factor_integral(inp.quadruple()?, &inp.deform()?, inp.precision).ctx(inp)?)),
    },
    Formula {
        id: "mixed_vs_form_factor",
        about: "four-point mixed trace (−,−,+,+) against the single-integral form factor",
        params: &["beta1", "beta2", "beta3", "beta4", "zeta"],
        deform: Deform::Both,
        eval: |inp| {
            let c = compare_mixed_with_form_factor(inp.quadruple()?, &[inp.complex("zeta")?], &inp.deform()?, inp.precision).ctx(inp)?;
            let mut o = Outcome::compare(c.traces[0].1, c.form_factor, 1e-4);
            o.residual = c.residual;
            Ok(o)
        },
    },
];

const ALIASES: &[(&str, &str)] = &[("G", "g"), ("G_tilde", "g_tilde"), ("G_bar", "g_bar")];

pub fn lookup(id: &str) -> CliResult<&'static Formula> {
    let id = ALIASES.iter().find(|(a, _)| *a == id).map(|(_, t)| *t).unwrap_or(id);
    FORMULAS.iter().find(|f| f.id == id).ok_or_else(|| CliError::UnknownFormula(id.into()))
}

pub fn formula_ids() -> Vec<&'static str> {
    FORMULAS.iter().map(|f| f.id).collect()
}
