//! Acceptance report: one PASS/FAIL line per criterion, with diagnostics.
//! Exits 0 after printing; set ACCEPTANCE_STRICT=1 to exit 1 on any FAIL.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};
use yangtrace::barnes_functions::{g_dual, g_fn, g_tilde_fn, g_bar_fn, GKind};
use yangtrace::contour_quadrature::mellin_barnes_4gamma;
use yangtrace::gauss_manin::{
    classical_identity_residual, compare_mixed_with_form_factor, elliptic_period, gm_connection, gm_connection_printed,
    gm_identity_n2, gm_residual, total_difference_identity, trace_mixed_1_3, QuadraticKernel, Segment,
};
use yangtrace::rmatrix::{r_full, ChargeConjugation};
use yangtrace::special_core::{c64, real, relative_residual};
use yangtrace::trace_evaluators::{
    general_trace, free_point_routes_type_i, trace_prefactor, trace_type_i_2pt, trace_type_ii_multipoint_vanishing,
    type_ii_residue_at_hbar, ContourOptions, Sign, TraceSpec,
};
use yangtrace::vertex_trace_engine::{
    reduce_product, trace_ratio_integral, trace_ratio_product, FieldFactor, FieldKind, OperatorProduct,
};
use yangtrace::{DeformParams, PrecisionConfig};

type C = Complex64;

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self { pass, summary: summary.into(), details: Vec::new() }
    }

    fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }
}

fn prec() -> PrecisionConfig {
    PrecisionConfig::default()
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + criterion)
}

fn draw(r: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> C {
    c64(r.gen_range(re.0..re.1), r.gen_range(im.0..im.1))
}

fn sign(r: &mut ChaCha8Rng) -> Sign {
    if r.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn cluster<const N: usize>(r: &mut ChaCha8Rng, spread: f64, im: f64) -> [C; N] {
    std::array::from_fn(|_| draw(r, (0.0, spread), (-im, im)))
}

fn params(h: f64, g: f64) -> DeformParams {
    DeformParams::real(h, g).expect("valid deformation")
}

/// Lanczos Γ (g = 7, n = 9), independent of the library's Stirling route.
fn oracle_gamma(z: C) -> C {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        return PI / ((PI * z).sin() * oracle_gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = c64(COEF[0], 0.0);
    for (k, c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + 7.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn mat_mul(a: &[[C; 4]; 4], b: &[[C; 4]; 4]) -> [[C; 4]; 4] {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn criterion_1() -> Verdict {
    let mut r = rng(1);
    let p = params(1.0, 2.0);
    // C ⊗ 1 with index 2i + j for (first, second)
    let cm = ChargeConjugation.matrix();
    let mut c1 = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                c1[2 * i + j][2 * k + j] = cm[i][k];
            }
        }
    }
    let (mut unit, mut cross) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let z = draw(&mut r, (-3.0, 3.0), (-3.0, 3.0));
        let a = r_full(z, &p).unwrap().0;
        let b = r_full(-z, &p).unwrap().0;
        let prod = mat_mul(&a, &b);
        for i in 0..4 {
            for j in 0..4 {
                let id = if i == j { 1.0 } else { 0.0 };
                unit = unit.max((prod[i][j] - id).norm());
            }
        }
        let lhs = mat_mul(&mat_mul(&c1, &a), &c1);
        let shifted = r_full(-z - 1.0, &p).unwrap().0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let t1 = shifted[2 * k + j][2 * i + l];
                        cross = cross.max((lhs[2 * i + j][2 * k + l] - t1).norm());
                    }
                }
            }
        }
    }
    Verdict::new(unit < 1e-10 && cross < 1e-10, format!("unitarity {unit:.2e}, crossing {cross:.2e} over 100 draws"))
}

fn criterion_2() -> Verdict {
    let p = prec();
    let grid: Vec<C> = (0..10)
        .flat_map(|i| (0..5).map(move |j| c64(-0.855 + 0.19 * i as f64, -0.4 + 0.2 * j as f64)))
        .collect();
    let (mut p1, mut printed, mut inverted, mut bar, mut dual) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut dual_count = 0;
    for g in [1.5, 2.0, 3.0] {
        let dp = params(1.0, g);
        p1 = p1
            .max((g_fn(real(1.0), &dp, &p).unwrap() - 1.0).norm())
            .max((g_tilde_fn(real(1.0), &dp, &p).unwrap() - 1.0).norm())
            .max((g_bar_fn(real(0.0), &dp, &p).unwrap() - 1.0).norm());
        for &z in &grid {
            let gz = g_fn(z, &dp, &p).unwrap();
            let tz = g_tilde_fn(z, &dp, &p).unwrap();
            p1 = p1.max(relative_residual(gz, g_fn(-z, &dp, &p).unwrap()));
            p1 = p1.max(relative_residual(tz, g_tilde_fn(-z, &dp, &p).unwrap()));
            let s = |w: C| (PI * w / g).sin();
            printed = printed.max(relative_residual(gz * tz, z * s(real(1.0)) / s(z)));
            inverted = inverted.max(relative_residual(gz * tz, s(z) / (z * s(real(1.0)))));
            let bz = g_bar_fn(z, &dp, &p).unwrap();
            let rhs = PI * z / g / s(z);
            bar = bar.max(relative_residual(bz * g_bar_fn(-z, &dp, &p).unwrap(), rhs));
            bar = bar.max(relative_residual(bz * g_bar_fn(z - 1.0, &dp, &p).unwrap(), rhs));
            for kind in [GKind::Standard, GKind::Tilde, GKind::Bar] {
                if let Ok(d) = g_dual(kind, z, &dp, &p) {
                    dual = dual.max(d.residual);
                    dual_count += 1;
                }
            }
        }
    }
    let pass = p1 < 1e-8 && printed < 1e-8 && bar < 1e-8 && dual < 1e-6;
    Verdict::new(
        pass,
        format!("first group {p1:.2e}; product identity as printed {printed:.2e}; Ḡ identities {bar:.2e}; dual routes {dual:.2e} ({dual_count} points)"),
    )
    .detail(format!("the product identity with the ratio inverted, (ħ/z)sin(πz/γ)/sin(πħ/γ), holds to {inverted:.2e}"))
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let (mut best, mut standard_wins) = (0.0f64, 0);
    let mut worst_other = f64::INFINITY;
    for _ in 0..10 {
        let [a, b, c, d]: [C; 4] = std::array::from_fn(|_| draw(&mut r, (0.2, 1.5), (-0.3, 0.3)));
        let mb = mellin_barnes_4gamma(a, b, c, d, &prec()).unwrap();
        let num = oracle_gamma(a + c) * oracle_gamma(a + d) * oracle_gamma(b + c) * oracle_gamma(b + d);
        let sum = a + b + c + d;
        let rs = relative_residual(mb.numeric, num / oracle_gamma(sum));
        let rp = relative_residual(mb.numeric, num / oracle_gamma(sum + 1.0));
        if rs <= rp {
            standard_wins += 1;
        }
        best = best.max(rs.min(rp));
        worst_other = worst_other.min(rs.max(rp));
    }
    let variant = if standard_wins == 10 { "Γ(a+b+c+d)" } else if standard_wins == 0 { "Γ(1+a+b+c+d)" } else { "mixed" };
    Verdict::new(best < 1e-8 && (standard_wins == 10 || standard_wins == 0), format!("confirmed denominator {variant}, max residual {best:.2e}"))
        .detail(format!("the other variant misses by at least {worst_other:.2e}"))
}

fn random_neutral(r: &mut ChaCha8Rng) -> OperatorProduct {
    let mut arg = || draw(r, (-0.4, 0.4), (-0.2, 0.2));
    let f = |k: FieldKind, a: C, p: i32| FieldFactor::new(k, a, p).unwrap();
    let phi = [
        vec![f(FieldKind::PhiMinus, arg(), 1), f(FieldKind::PhiMinus, arg(), -2), f(FieldKind::PhiMinus, arg(), 1)],
        vec![f(FieldKind::MuMinus, arg(), 1), f(FieldKind::PhiMinus, arg(), -1), f(FieldKind::PhiMinus, arg(), -1)],
        vec![f(FieldKind::PhiMinus, arg(), 2), f(FieldKind::MuMinus, arg(), -1)],
    ];
    let eta = [
        vec![f(FieldKind::EtaPlus, arg(), 1), f(FieldKind::EtaPlus, arg(), -1)],
        vec![f(FieldKind::PhiPlus, arg(), 1), f(FieldKind::EtaPlus, arg(), -1), f(FieldKind::EtaPlus, arg(), -1)],
        vec![f(FieldKind::EtaPlus, arg(), 1), f(FieldKind::EtaPlus, arg(), 1), f(FieldKind::EtaPlus, arg(), -2)],
    ];
    let mut factors = phi[r.gen_range(0..3)].clone();
    factors.extend(eta[r.gen_range(0..3)].iter().copied());
    OperatorProduct::new(factors)
}

fn criterion_4() -> Verdict {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let g = r.gen_range(2.2..3.5);
        let dp = params(1.0, g);
        let product = reduce_product(&random_neutral(&mut r), &dp);
        let a = trace_ratio_product(&product, &dp, &prec()).unwrap();
        let b = trace_ratio_integral(&product, &dp, &prec()).unwrap();
        worst = worst.max(relative_residual(a, b));
    }
    Verdict::new(worst < 1e-8, format!("product vs integral, max residual {worst:.2e} over 30 products"))
}

fn type_i_closed(nu2: Sign, zeta: C, dp: &DeformParams) -> C {
    let (h, g) = (dp.hbar(), dp.gamma());
    let x = zeta / (2.0 * h);
    nu2.value() * g_fn(zeta, dp, &prec()).unwrap() / (2.0 * h).sqrt() * oracle_gamma(1.0 + x) / oracle_gamma(1.5 + x)
        * oracle_gamma((g + h + zeta) / g)
        * oracle_gamma((g + h - zeta) / g)
        / oracle_gamma((g + 2.0 * h) / g)
}

fn criterion_5() -> Verdict {
    let mut r = rng(5);
    let mut generic = 0.0f64;
    for k in 0..20 {
        let g = if k % 4 == 0 { r.gen_range(1.3..1.8) } else { r.gen_range(2.3..3.6) };
        let dp = params(1.0, g);
        let nu2 = sign(&mut r);
        let (z1, z2) = (draw(&mut r, (-0.3, 0.3), (-0.2, 0.2)), draw(&mut r, (-0.3, 0.3), (-0.2, 0.2)));
        let spec = TraceSpec::new(vec![], vec![(z1, nu2.flip()), (z2, nu2)], dp).unwrap();
        let numeric = general_trace(&spec, &prec()).unwrap().value;
        generic = generic.max(relative_residual(numeric, type_i_closed(nu2, z1 - z2, &dp)));
    }
    let free = params(1.0, 2.0);
    let mut three = 0.0f64;
    for _ in 0..5 {
        let nu2 = sign(&mut r);
        let (z1, z2) = (draw(&mut r, (-0.3, 0.3), (-0.2, 0.2)), draw(&mut r, (-0.3, 0.3), (-0.2, 0.2)));
        let spec = TraceSpec::new(vec![], vec![(z1, nu2.flip()), (z2, nu2)], free).unwrap();
        let pre = trace_prefactor(&spec, &prec()).unwrap();
        let split = free_point_routes_type_i(nu2, z1, z2, &free, &prec()).unwrap();
        let x = (z1 - z2) / 2.0;
        let limit = nu2.value() * g_fn(z1 - z2, &free, &prec()).unwrap() / 2f64.sqrt() * oracle_gamma(1.0 + x) * oracle_gamma(1.5 - x);
        let (a, b) = (pre * split.semicircle, pre * split.principal_value);
        three = three.max(max([relative_residual(a, limit), relative_residual(b, limit), relative_residual(a, b)]));
    }
    let mut norm = 0.0f64;
    for g in [1.5, 2.5, 3.0] {
        for nu2 in [Sign::Plus, Sign::Minus] {
            let t = trace_type_i_2pt(nu2, nu2.flip(), real(-1.0), real(0.0), &params(1.0, g), &prec()).unwrap();
            norm = norm.max((t.value - nu2.value() * (PI / 2.0).sqrt()).norm());
        }
    }
    Verdict::new(
        generic < 1e-6 && three < 1e-6 && norm < 1e-10,
        format!("contour vs closed form {generic:.2e} (20 draws); three routes at γ = 2ħ {three:.2e}; value at −ħ {norm:.2e}"),
    )
}

fn type_ii_closed(eps1: Sign, beta: C, dp: &DeformParams) -> C {
    let (h, g) = (dp.hbar(), dp.gamma());
    let x = beta / (2.0 * h);
    eps1.value() * (2.0 * h).sqrt() * g_tilde_fn(beta, dp, &prec()).unwrap() * oracle_gamma(0.5 + x) / oracle_gamma(x)
        * oracle_gamma((beta - h) / g)
        * oracle_gamma((g - beta - h) / g)
        / (g * oracle_gamma((g - 2.0 * h) / g))
}

fn criterion_6() -> Verdict {
    let mut r = rng(6);
    let mut generic = 0.0f64;
    for k in 0..20 {
        let g = if k % 4 == 0 { r.gen_range(1.3..1.8) } else { r.gen_range(2.3..3.6) };
        let dp = params(1.0, g);
        let eps1 = sign(&mut r);
        // the separating line needs |Re(β1 − β2)| < γ − ħ
        let b1 = draw(&mut r, (-0.3, 0.3), (-0.2, 0.2));
        let reach = (0.8 * (g - 1.0)).min(0.6);
        let b2 = b1 + draw(&mut r, (-reach, reach), (-0.4, 0.4));
        let spec = TraceSpec::new(vec![(b1, eps1), (b2, eps1.flip())], vec![], dp).unwrap();
        let numeric = general_trace(&spec, &prec()).unwrap().value;
        generic = generic.max(relative_residual(numeric, type_ii_closed(eps1, b1 - b2, &dp)));
    }
    let mut vanish = 0.0f64;
    for _ in 0..5 {
        let e = sign(&mut r);
        let b: [C; 2] = cluster(&mut r, 0.5, 0.2);
        let rep = trace_type_ii_multipoint_vanishing(&b, &[e, e.flip()], &params(1.0, 2.0), &prec()).unwrap();
        vanish = vanish.max(rep.residual);
    }
    let mut residue = 0.0f64;
    for g in [2.5, 3.0, 4.0] {
        for eps1 in [Sign::Plus, Sign::Minus] {
            let b2 = draw(&mut r, (-0.3, 0.3), (-0.2, 0.2));
            let res = type_ii_residue_at_hbar(eps1, b2, &params(1.0, g), &prec()).unwrap();
            residue = residue.max((res - eps1.value() * (2.0 / PI).sqrt()).norm());
        }
    }
    Verdict::new(
        generic < 1e-6 && vanish < 1e-8 && residue < 1e-6,
        format!("contour vs closed form {generic:.2e} (20 draws); relative value at γ = 2ħ {vanish:.2e}; residue at ħ {residue:.2e}"),
    )
}

fn criterion_7() -> Verdict {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    let mut err = 0.0f64;
    for _ in 0..10 {
        let b: [C; 4] = cluster(&mut r, 0.5, 0.2);
        let mut eps = [Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus];
        eps.rotate_left(r.gen_range(0..4));
        let rep = trace_type_ii_multipoint_vanishing(&b, &eps, &params(1.0, 2.0), &prec()).unwrap();
        worst = worst.max(rep.residual);
        err = err.max(rep.error_estimate / rep.abs_scale);
    }
    Verdict::new(worst < 1e-6, format!("four-point residual {worst:.2e} over 10 draws")).detail(format!("quadrature error estimate {err:.2e}"))
}

fn criterion_8() -> Verdict {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let beta: [C; 3] = cluster(&mut r, 0.7, 0.2);
        for m in 1..=3 {
            for s in [Sign::Plus, Sign::Minus] {
                let c = total_difference_identity(m, s, beta, 1.0, &prec(), &ContourOptions::default()).unwrap();
                worst = worst.max(c.residual);
            }
        }
    }
    Verdict::new(worst < 1e-8, format!("max relative residual {worst:.2e} (m = 1, 2, 3, both signs, 20 draws)"))
}

fn criterion_9() -> Verdict {
    let mut r = rng(9);
    let (mut printed, mut derived) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let beta: [C; 3] = cluster(&mut r, 0.6, 0.2);
        for k in [Sign::Plus, Sign::Minus] {
            printed = max([printed].into_iter().chain(gm_residual(beta, k, 1.0, &gm_connection_printed(beta, 1.0), &prec()).unwrap()));
            derived = max([derived].into_iter().chain(gm_residual(beta, k, 1.0, &gm_connection(beta, 1.0), &prec()).unwrap()));
        }
    }
    let (mut n2_printed, mut n2_derived) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let beta: [C; 4] = cluster(&mut r, 0.6, 0.2);
        let s = sign(&mut r);
        n2_printed = n2_printed.max(gm_identity_n2(beta, s, 1.0, QuadraticKernel::Printed, &prec()).unwrap().residual);
        n2_derived = n2_derived.max(gm_identity_n2(beta, s, 1.0, QuadraticKernel::Derived, &prec()).unwrap().residual);
    }
    Verdict::new(
        printed < 1e-8 && n2_printed < 1e-6,
        format!("connection as printed {printed:.2e} (10 draws × p × k); four-point kernel as printed {n2_printed:.2e}"),
    )
    .detail(format!("connection with the derived correction (ħ/D)(1, β3+ħ)ᵀ(−β3, 1): {derived:.2e}"))
    .detail(format!("four-point kernel with +v(2ħ−Σβ): {n2_derived:.2e}"))
}

fn criterion_10() -> Verdict {
    let mut r = rng(10);
    fn agm(mut a: f64, mut b: f64) -> f64 {
        for _ in 0..40 {
            (a, b) = (0.5 * (a + b), (a * b).sqrt());
        }
        a
    }
    let k_of = |m: f64| PI / (2.0 * agm(1.0, (1.0 - m).sqrt()));
    let (mut classical, mut period) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let mut b = [r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)];
        b.sort_by(f64::total_cmp);
        classical = classical.max(classical_identity_residual(b, &prec()).unwrap());
        let span = b[2] - b[0];
        let lower = elliptic_period(0, b, Segment::Lower, &prec()).unwrap();
        let upper = elliptic_period(0, b, Segment::Upper, &prec()).unwrap();
        period = period
            .max((lower - 2.0 * k_of((b[1] - b[0]) / span) / span.sqrt()).abs())
            .max((upper - 2.0 * k_of((b[2] - b[1]) / span) / span.sqrt()).abs());
    }
    Verdict::new(classical < 1e-8 && period < 1e-10, format!("classical identity {classical:.2e}; periods vs AGM {period:.2e}"))
}

fn criterion_11() -> Verdict {
    let mut r = rng(11);
    let free = params(1.0, 2.0);
    let (mut closed, mut reduction) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let beta: [C; 3] = cluster(&mut r, 0.6, 0.2);
        let zeta = draw(&mut r, (-0.5, 0.5), (-0.3, 0.3));
        let t = trace_mixed_1_3(beta, zeta, &free, &prec()).unwrap();
        closed = closed.max(t.residual);
        reduction = reduction.max(t.reduction_residual);
    }
    let (mut ff, mut spread) = (0.0f64, 0.0f64);
    for _ in 0..3 {
        let beta: [C; 4] = cluster(&mut r, 0.3, 0.1);
        let zetas = [draw(&mut r, (-0.5, 0.7), (-0.3, 0.3)), draw(&mut r, (-0.5, 0.7), (-0.3, 0.3))];
        let c = compare_mixed_with_form_factor(beta, &zetas, &free, &prec()).unwrap();
        ff = ff.max(c.residual);
        spread = spread.max(c.zeta_spread);
    }
    Verdict::new(
        closed < 1e-5 && ff < 1e-4,
        format!("three-point closed form {closed:.2e} (10 draws); four-point trace vs form factor {ff:.2e} (3 draws)"),
    )
    .detail(format!("reduction of the contour integral to the two difference-identity moments: {reduction:.2e}"))
    .detail(format!("four-point trace spread over ζ at fixed β: {spread:.2e}"))
}

fn criterion_12() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_yangtrace");
    let run = || {
        let start = Instant::now();
        let out = std::process::Command::new(bin).args(["verify", "all", "--seed", "7"]).output().expect("run yangtrace");
        (out, start.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let deterministic = a.stdout == b.stdout && !a.stdout.is_empty();
    let code = a.status.code().unwrap_or(-1);
    let text = String::from_utf8_lossy(&a.stdout);
    let failing = text.lines().filter(|l| l.contains("\"pass\":false")).count();
    let mut ids: Vec<String> = text
        .lines()
        .filter(|l| l.contains("\"pass\":false"))
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .filter_map(|v| v["formula"].as_str().map(String::from))
        .collect();
    ids.sort();
    ids.dedup();
    let slowest = ta.max(tb);
    Verdict::new(
        deterministic && code == 0 && slowest < Duration::from_secs(600),
        format!(
            "deterministic {deterministic}; exit code {code}; wall time {:.1} s; {failing} of {} records fail",
            slowest.as_secs_f64(),
            text.lines().count()
        ),
    )
    .detail(format!("failing formulas: {}", ids.join(", ")))
}

fn main() {
    let criteria: [(&str, &str, u64, fn() -> Verdict); 12] = [
        ("C1", "R-matrix unitarity and crossing", 1, criterion_1),
        ("C2", "G-function properties and dual representations", 30, criterion_2),
        ("C3", "Mellin–Barnes integral vs closed forms", 10, criterion_3),
        ("C4", "trace engine: product vs integral", 30, criterion_4),
        ("C5", "two-point type I trace", 60, criterion_5),
        ("C6", "two-point type II trace", 30, criterion_6),
        ("C7", "four-point type II vanishing", 60, criterion_7),
        ("C8", "total-difference identity", 60, criterion_8),
        ("C9", "deformed Gauss–Manin system", 90, criterion_9),
        ("C10", "classical elliptic identity and periods", 5, criterion_10),
        ("C11", "mixed traces vs closed form and form factor", 300, criterion_11),
        ("C12", "verify all: determinism, exit code, wall time", 600, criterion_12),
    ];
    let mut failed = 0;
    for (tag, name, budget, run) in criteria {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        let on_time = secs < budget as f64;
        let pass = v.pass && on_time;
        if !pass {
            failed += 1;
        }
        let timing = if on_time { format!("{secs:.2} s") } else { format!("{secs:.2} s, over the {budget} s budget") };
        println!("{} {tag:<3} {name}: {} [{timing}]", if pass { "PASS" } else { "FAIL" }, v.summary);
        for d in v.details {
            println!("         {d}");
        }
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
