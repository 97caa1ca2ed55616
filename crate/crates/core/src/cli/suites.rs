//! Named verification suites. Each suite is a seeded list of (formula id,
//! parameters) jobs, so every record can be replayed with `eval`.

use super::{format_complex, format_sign, CliError, CliResult, ParamMap};
use crate::trace_evaluators::Sign;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITES: &[&str] = &["special", "barnes", "rmatrix", "vertex", "contour", "traces", "gauss-manin", "mixed"];

pub type Job = (String, ParamMap);

struct Draw(ChaCha8Rng);

impl Draw {
    fn new(seed: u64, suite: usize) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(suite as u64)))
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.gen_range(lo..hi)
    }

    fn complex(&mut self, re: (f64, f64), im: (f64, f64)) -> Complex64 {
        Complex64::new(self.uniform(re.0, re.1), self.uniform(im.0, im.1))
    }

    fn sign(&mut self) -> Sign {
        if self.0.gen_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Points with real parts inside a window of width `spread`.
    fn cluster(&mut self, n: usize, spread: f64, im: f64) -> Vec<Complex64> {
        (0..n).map(|_| self.complex((0.0, spread), (-im, im))).collect()
    }
}

fn job(id: &str, pairs: Vec<(&str, String)>) -> Job {
    (id.to_string(), pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn c(z: Complex64) -> String {
    format_complex(z)
}

fn r(x: f64) -> String {
    format!("{x}")
}

fn s(sign: Sign) -> String {
    format_sign(sign)
}

fn with_betas(mut pairs: Vec<(&'static str, String)>, beta: &[Complex64]) -> Vec<(&'static str, String)> {
    const NAMES: [&str; 4] = ["beta1", "beta2", "beta3", "beta4"];
    for (k, b) in beta.iter().enumerate() {
        pairs.push((NAMES[k], c(*b)));
    }
    pairs
}

fn special(d: &mut Draw) -> Vec<Job> {
    (0..12).map(|_| job("gamma", vec![("z", c(d.complex((-3.0, 3.0), (-2.0, 2.0))))])).collect()
}

/// 50-point grid in the strip |Re z| < 1, |Im z| ≤ 0.4.
pub fn g_grid() -> Vec<Complex64> {
    let mut out = Vec::new();
    for i in 0..10 {
        for j in 0..5 {
            out.push(Complex64::new(-0.855 + 0.19 * i as f64, -0.4 + 0.2 * j as f64));
        }
    }
    out
}

fn barnes(_: &mut Draw) -> Vec<Job> {
    let mut jobs = Vec::new();
    for g in [1.5, 2.0, 3.0] {
        let dp = || vec![("hbar", "1".to_string()), ("gamma", r(g))];
        for kind in ["standard", "tilde", "bar"] {
            let mut p = dp();
            p.push(("kind", kind.into()));
            jobs.push(job("g_normalization", p));
        }
        for z in g_grid() {
            let with = |extra: Vec<(&'static str, String)>| {
                let mut p = dp();
                p.extend(extra);
                p
            };
            for kind in ["standard", "tilde"] {
                jobs.push(job("g_even", with(vec![("kind", kind.into()), ("z", c(z))])));
            }
            jobs.push(job("g_product_identity", with(vec![("z", c(z))])));
            jobs.push(job("g_product_identity_inverted", with(vec![("z", c(z))])));
            jobs.push(job("g_bar_reflection", with(vec![("z", c(z))])));
            jobs.push(job("g_bar_shift", with(vec![("z", c(z))])));
            for id in ["g", "g_tilde", "g_bar"] {
                jobs.push(job(id, with(vec![("z", c(z))])));
            }
        }
    }
    jobs
}

fn rmatrix(d: &mut Draw) -> Vec<Job> {
    let mut jobs = Vec::new();
    for _ in 0..30 {
        let z = c(d.complex((-2.0, 2.0), (-2.0, 2.0)));
        jobs.push(job("unitarity", vec![("hbar", "1".into()), ("z", z.clone())]));
        jobs.push(job("crossing", vec![("hbar", "1".into()), ("z", z)]));
    }
    for _ in 0..10 {
        let (z1, z2) = (d.complex((-2.0, 2.0), (-2.0, 2.0)), d.complex((-2.0, 2.0), (-2.0, 2.0)));
        jobs.push(job("yang_baxter", vec![("hbar", "1".into()), ("z1", c(z1)), ("z2", c(z2))]));
    }
    jobs
}

/// A random neutral product, possibly with μ₋ and φ₊ factors that reduce to
/// neutral φ₋ and η₊ content.
fn neutral_factors(d: &mut Draw) -> String {
    let arg = |d: &mut Draw| c(d.complex((-0.4, 0.4), (-0.2, 0.2)));
    let mut items = Vec::new();
    match d.0.gen_range(0..3) {
        0 => {
            items.push(format!("phi_minus:{}:1", arg(d)));
            items.push(format!("phi_minus:{}:-2", arg(d)));
            items.push(format!("phi_minus:{}:1", arg(d)));
        }
        1 => {
            items.push(format!("mu_minus:{}:1", arg(d)));
            items.push(format!("phi_minus:{}:-1", arg(d)));
            items.push(format!("phi_minus:{}:-1", arg(d)));
        }
        _ => {
            items.push(format!("phi_minus:{}:2", arg(d)));
            items.push(format!("mu_minus:{}:-1", arg(d)));
        }
    }
    match d.0.gen_range(0..3) {
        0 => {
            items.push(format!("eta_plus:{}:1", arg(d)));
            items.push(format!("eta_plus:{}:-1", arg(d)));
        }
        1 => {
            items.push(format!("phi_plus:{}:1", arg(d)));
            items.push(format!("eta_plus:{}:-1", arg(d)));
            items.push(format!("eta_plus:{}:-1", arg(d)));
        }
        _ => {
            items.push(format!("eta_plus:{}:1", arg(d)));
            items.push(format!("eta_plus:{}:1", arg(d)));
            items.push(format!("eta_plus:{}:-2", arg(d)));
        }
    }
    items.join(",")
}

fn vertex(d: &mut Draw) -> Vec<Job> {
    (0..20)
        .map(|_| {
            let g = d.uniform(2.2, 3.5);
            job("trace_ratio", vec![("hbar", "1".into()), ("gamma", r(g)), ("factors", neutral_factors(d))])
        })
        .collect()
}

fn contour(d: &mut Draw) -> Vec<Job> {
    let mut jobs: Vec<Job> = (0..10)
        .map(|_| {
            let mut z = || c(d.complex((0.2, 1.5), (-0.3, 0.3)));
            job("mellin_barnes", vec![("a", z()), ("b", z()), ("c", z()), ("d", z())])
        })
        .collect();
    jobs.push(job("principal_value_reciprocal", vec![]));
    jobs
}

fn traces(d: &mut Draw) -> Vec<Job> {
    let mut jobs = Vec::new();
    let small = |d: &mut Draw| d.complex((-0.3, 0.3), (-0.2, 0.2));
    for _ in 0..8 {
        let g = d.uniform(2.4, 3.6);
        jobs.push(job(
            "trace_type_i_2pt",
            vec![("hbar", "1".into()), ("gamma", r(g)), ("nu2", s(d.sign())), ("zeta1", c(small(d))), ("zeta2", c(small(d)))],
        ));
    }
    for _ in 0..4 {
        jobs.push(job(
            "trace_type_i_2pt",
            vec![("hbar", "1".into()), ("gamma", "2".into()), ("nu2", s(d.sign())), ("zeta1", c(small(d))), ("zeta2", c(small(d)))],
        ));
    }
    for g in ["1.5", "3"] {
        for nu2 in [Sign::Plus, Sign::Minus] {
            jobs.push(job("type_i_normalization", vec![("hbar", "1".into()), ("gamma", g.into()), ("nu2", s(nu2))]));
        }
    }
    for _ in 0..6 {
        let g = d.uniform(2.4, 3.6);
        jobs.push(job(
            "trace_type_ii_2pt",
            vec![("hbar", "1".into()), ("gamma", r(g)), ("eps1", s(d.sign())), ("beta1", c(small(d))), ("beta2", c(small(d)))],
        ));
    }
    for _ in 0..3 {
        let beta = d.cluster(2, 0.5, 0.2);
        let e = d.sign();
        jobs.push(job(
            "type_ii_vanishing",
            with_betas(vec![("hbar", "1".into()), ("gamma", "2".into()), ("eps1", s(e)), ("eps2", s(e.flip()))], &beta),
        ));
    }
    for eps1 in [Sign::Plus, Sign::Minus] {
        jobs.push(job("type_ii_residue", vec![("hbar", "1".into()), ("gamma", "3".into()), ("eps1", s(eps1)), ("beta2", c(small(d)))]));
    }
    for _ in 0..3 {
        let beta = d.cluster(4, 0.5, 0.2);
        let mut eps = [Sign::Minus, Sign::Minus, Sign::Plus, Sign::Plus];
        let k = d.0.gen_range(0..4);
        eps.rotate_left(k);
        let mut p = vec![("hbar", "1".into()), ("gamma", "2".into())];
        for (name, e) in ["eps1", "eps2", "eps3", "eps4"].into_iter().zip(eps) {
            p.push((name, s(e)));
        }
        jobs.push(job("type_ii_vanishing", with_betas(p, &beta)));
    }
    let z: Vec<Complex64> = (0..4).map(|_| d.complex((0.0, 0.4), (-0.15, 0.15))).collect();
    jobs.push(job(
        "type_i_shift_invariance",
        vec![
            ("hbar", "1".into()),
            ("gamma", "3".into()),
            ("zeta1", c(z[0])),
            ("zeta2", c(z[1])),
            ("zeta3", c(z[2])),
            ("zeta4", c(z[3])),
            ("nu1", "+".into()),
            ("nu2", "+".into()),
            ("nu3", "-".into()),
            ("nu4", "-".into()),
        ],
    ));
    jobs
}

fn gauss_manin(d: &mut Draw) -> Vec<Job> {
    let mut jobs = Vec::new();
    let h = || ("hbar", "1".to_string());
    for _ in 0..2 {
        let beta = d.cluster(3, 0.6, 0.2);
        for m in 1..=3 {
            for sign in [Sign::Plus, Sign::Minus] {
                jobs.push(job("total_difference_identity", with_betas(vec![h(), ("m", m.to_string()), ("sign", s(sign))], &beta)));
            }
        }
    }
    for _ in 0..2 {
        let beta = d.cluster(3, 0.6, 0.2);
        for k in [Sign::Plus, Sign::Minus] {
            for id in ["gauss_manin_connection", "gauss_manin_connection_printed"] {
                jobs.push(job(id, with_betas(vec![h(), ("k", s(k))], &beta)));
            }
        }
    }
    for _ in 0..2 {
        let beta = d.cluster(4, 0.6, 0.2);
        let sign = d.sign();
        for kernel in ["derived", "printed"] {
            jobs.push(job("gauss_manin_four_point", with_betas(vec![h(), ("sign", s(sign)), ("kernel", kernel.into())], &beta)));
        }
    }
    for _ in 0..2 {
        jobs.push(job("third_point_relation", with_betas(vec![h()], &d.cluster(3, 0.6, 0.2))));
    }
    for _ in 0..3 {
        let mut b = [d.uniform(-2.0, 2.0), d.uniform(-2.0, 2.0), d.uniform(-2.0, 2.0)];
        b.sort_by(f64::total_cmp);
        jobs.push(job("classical_identity", vec![("beta1", r(b[0])), ("beta2", r(b[1])), ("beta3", r(b[2]))]));
    }
    for _ in 0..2 {
        let beta = d.cluster(3, 0.6, 0.2);
        let zeta = d.complex((-0.5, 0.5), (-0.3, 0.3));
        jobs.push(job("mixed_trace_three", with_betas(vec![h(), ("gamma", "2".into()), ("zeta", c(zeta))], &beta)));
    }
    jobs
}

fn mixed(d: &mut Draw) -> Vec<Job> {
    let mut jobs = Vec::new();
    for _ in 0..2 {
        let beta = d.cluster(2, 0.5, 0.3);
        let e = d.sign();
        let zeta = d.complex((-0.5, 0.5), (-0.3, 0.3));
        jobs.push(job(
            "mixed_pair_integral",
            with_betas(vec![("hbar", "1".into()), ("gamma", "2".into()), ("eps1", s(e)), ("eps2", s(e.flip())), ("zeta", c(zeta))], &beta),
        ));
    }
    let beta = d.cluster(4, 0.3, 0.1);
    for _ in 0..2 {
        let zeta = d.complex((-0.5, 0.7), (-0.3, 0.3));
        jobs.push(job("mixed_vs_form_factor", with_betas(vec![("hbar", "1".into()), ("gamma", "2".into()), ("zeta", c(zeta))], &beta)));
    }
    jobs
}

/// Jobs of one suite, or of every suite for "all"; deterministic in `seed`.
pub fn suite_jobs(name: &str, seed: u64) -> CliResult<Vec<Job>> {
    let build = |k: usize| -> Vec<Job> {
        let mut d = Draw::new(seed, k);
        match SUITES[k] {
            "special" => special(&mut d),
            "barnes" => barnes(&mut d),
            "rmatrix" => rmatrix(&mut d),
            "vertex" => vertex(&mut d),
            "contour" => contour(&mut d),
            "traces" => traces(&mut d),
            "gauss-manin" => gauss_manin(&mut d),
            _ => mixed(&mut d),
        }
    };
    if name == "all" {
        return Ok((0..SUITES.len()).flat_map(build).collect());
    }
    match SUITES.iter().position(|s| *s == name) {
        Some(k) => Ok(build(k)),
        None => Err(CliError::UnknownSuite(name.into(), format!("{}, all", SUITES.join(", ")))),
    }
}
