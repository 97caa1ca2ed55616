//! Contour integration in the complex plane: vertical lines with pole
//! bookkeeping, snake paths, residues, arcs at infinity, and the four-Gamma
//! Mellin–Barnes integral.
//!
//! Every integral is normalized as ∮ f(v) dv / 2πi.

pub mod rules;

use crate::error::{Error, Result};
use crate::special_core::{gamma_fn, log_gamma, PrecisionConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SEPARATION_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Up => 1.0,
            Orientation::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Poles base + step·r, r = 0, 1, 2, ... A zero step is a single pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub base: Complex64,
    pub step: Complex64,
}

impl Ladder {
    pub fn new(base: Complex64, step: Complex64) -> Self {
        Self { base, step }
    }

    pub fn single(base: Complex64) -> Self {
        Self { base, step: Complex64::new(0.0, 0.0) }
    }

    pub fn point(&self, r: usize) -> Complex64 {
        self.base + self.step * r as f64
    }

    fn points(&self, terms: usize) -> Vec<Complex64> {
        if self.step.norm() == 0.0 {
            vec![self.base]
        } else {
            (0..terms.max(1)).map(|r| self.point(r)).collect()
        }
    }
}

/// Which poles a contour must enclose and which it must leave out.
/// For a downward line "inside" means to the right of it, for an upward line
/// to the left: in both cases the poles the closed contour winds around
/// counterclockwise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoleBook {
    pub inside: Vec<Ladder>,
    pub outside: Vec<Ladder>,
}

impl PoleBook {
    pub fn new(inside: Vec<Ladder>, outside: Vec<Ladder>) -> Self {
        Self { inside, outside }
    }

    pub fn inside_points(&self, terms: usize) -> Vec<Complex64> {
        self.inside.iter().flat_map(|l| l.points(terms)).collect()
    }

    pub fn outside_points(&self, terms: usize) -> Vec<Complex64> {
        self.outside.iter().flat_map(|l| l.points(terms)).collect()
    }

    /// Inside and outside sets must not share a pole.
    pub fn check_disjoint(&self, terms: usize) -> Result<()> {
        let outside = self.outside_points(terms);
        for p in self.inside_points(terms) {
            if let Some(q) = outside.iter().find(|q| (**q - p).norm() < SEPARATION_MARGIN) {
                return Err(Error::ContourConstruction(format!(
                    "pole {p} is both inside and outside (pinched against {q})"
                )));
            }
        }
        Ok(())
    }
}

/// A vertical line Re v = real_part that has been checked against a pole book.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalLine {
    real_part: f64,
    orientation: Orientation,
    clearance: f64,
}

impl VerticalLine {
    pub fn new(real_part: f64, orientation: Orientation, book: &PoleBook, terms: usize) -> Result<Self> {
        book.check_disjoint(terms)?;
        let (enclosed_right, sign_ok) = match orientation {
            Orientation::Down => (true, 1.0),
            Orientation::Up => (false, -1.0),
        };
        let _ = sign_ok;
        let mut clearance = f64::INFINITY;
        for (ladders, want_right) in [(&book.inside, enclosed_right), (&book.outside, !enclosed_right)] {
            for ladder in ladders.iter() {
                for p in ladder.points(terms) {
                    let offset = p.re - real_part;
                    let right = offset > SEPARATION_MARGIN;
                    let left = offset < -SEPARATION_MARGIN;
                    if (want_right && !right) || (!want_right && !left) {
                        return Err(Error::Separation { pole: p, line: real_part });
                    }
                    clearance = clearance.min(offset.abs());
                }
                let drifts_back = if want_right { ladder.step.re < 0.0 } else { ladder.step.re > 0.0 };
                if drifts_back {
                    return Err(Error::Separation { pole: ladder.point(terms.max(1)), line: real_part });
                }
            }
        }
        if !clearance.is_finite() {
            clearance = 0.5;
        }
        Ok(Self { real_part, orientation, clearance: clearance.min(1.0) })
    }

    /// Line through the middle of the gap between the two pole families.
    pub fn in_gap(orientation: Orientation, book: &PoleBook, terms: usize) -> Result<Self> {
        let (right, left) = match orientation {
            Orientation::Down => (book.inside_points(terms), book.outside_points(terms)),
            Orientation::Up => (book.outside_points(terms), book.inside_points(terms)),
        };
        let lo = left.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
        let hi = right.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
        let x = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                if lo >= hi {
                    return Err(Error::ContourConstruction(format!(
                        "no vertical gap: left poles reach Re = {lo}, right poles start at Re = {hi}"
                    )));
                }
                0.5 * (lo + hi)
            }
            (true, false) => lo + 0.5,
            (false, true) => hi - 0.5,
            (false, false) => 0.0,
        };
        Self::new(x, orientation, book, terms)
    }

    /// A line with no pole bookkeeping; the caller vouches for it.
    pub fn unchecked(real_part: f64, orientation: Orientation, clearance: f64) -> Self {
        Self { real_part, orientation, clearance: clearance.min(1.0) }
    }

    pub fn real_part(&self) -> f64 {
        self.real_part
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn point(&self, t: f64) -> Complex64 {
        Complex64::new(self.real_part, t)
    }
}

/// Piecewise-linear path from +i∞ (straight down onto the first waypoint)
/// through the waypoints and then straight down to -i∞.
#[derive(Debug, Clone, PartialEq)]
pub struct SnakePath {
    waypoints: Vec<Complex64>,
    clearance: f64,
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn ray_distance(p: Complex64, start: Complex64, upward: bool) -> f64 {
    let dy = p.im - start.im;
    if (upward && dy >= 0.0) || (!upward && dy <= 0.0) {
        (p.re - start.re).abs()
    } else {
        (p - start).norm()
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(d - c, a - c);
    let d2 = cross(d - c, b - c);
    let d3 = cross(b - a, c - a);
    let d4 = cross(b - a, d - a);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

impl SnakePath {
    pub fn new(waypoints: Vec<Complex64>, poles: &[Complex64]) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::ContourConstruction("snake path needs at least one waypoint".into()));
        }
        let n = waypoints.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i + 2)..n.saturating_sub(1) {
                if segments_intersect(waypoints[i], waypoints[i + 1], waypoints[j], waypoints[j + 1]) {
                    return Err(Error::ContourConstruction(format!("snake path crosses itself at segments {i} and {j}")));
                }
            }
        }
        let mut clearance = f64::INFINITY;
        for &p in poles {
            let mut d = ray_distance(p, waypoints[0], true).min(ray_distance(p, waypoints[n - 1], false));
            for w in waypoints.windows(2) {
                d = d.min(segment_distance(p, w[0], w[1]));
            }
            if d < SEPARATION_MARGIN {
                return Err(Error::ContourConstruction(format!("pole {p} lies on the snake path")));
            }
            clearance = clearance.min(d);
        }
        if !clearance.is_finite() {
            clearance = 0.5;
        }
        Ok(Self { waypoints, clearance: clearance.min(1.0) })
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn clearance(&self) -> f64 {
        self.clearance
    }
}

/// Residues at base + step·r summed with acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueLadder {
    pub ladder: Ladder,
    pub max_terms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContourPath {
    VerticalLine(VerticalLine),
    SnakePath(SnakePath),
    ResidueLadder(ResidueLadder),
    InfinitySemicircle { side: Side },
}

/// Quadrature nodes with weights already carrying dv/2πi and orientation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeSet {
    pub points: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl NodeSet {
    pub fn line(line: &VerticalLine, step: f64, t_lo: f64, t_hi: f64) -> Self {
        let k_lo = (t_lo / step).floor() as i64;
        let k_hi = (t_hi / step).ceil() as i64;
        let w = Complex64::new(line.orientation.sign() * step / (2.0 * PI), 0.0);
        let mut set = NodeSet::default();
        for k in k_lo..=k_hi {
            set.points.push(line.point(k as f64 * step));
            set.weights.push(w);
        }
        set
    }

    /// Counterclockwise circle scaled by `factor` (use -1 to excise a residue).
    pub fn circle(center: Complex64, radius: f64, nodes: usize, factor: f64) -> Self {
        let mut set = NodeSet::default();
        for j in 0..nodes {
            let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / nodes as f64);
            set.points.push(center + e * radius);
            set.weights.push(e * (radius * factor / nodes as f64));
        }
        set
    }

    pub fn extend(&mut self, other: NodeSet) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = f(*p) * *w;
            sum += v;
            abs += v.norm();
        }
        (sum, abs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    pub value: Complex64,
    /// ∫ |f| |dv| / 2π on the line, the natural cancellation scale.
    pub abs_integral: f64,
    pub step: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub nodes: usize,
}

/// ∫ f dv / 2πi along the oriented line.
pub fn integrate_vertical<F>(f: &F, line: &VerticalLine, precision: &PrecisionConfig) -> Result<LineIntegral>
where
    F: Fn(Complex64) -> Complex64,
{
    let g = |t: f64| f(line.point(t));
    let initial = 0.5 * line.clearance;
    let r = rules::trapezoid_real_line(&g, initial, precision.rel_tol, precision.max_quad_nodes)?;
    let s = line.orientation.sign() / (2.0 * PI);
    Ok(LineIntegral {
        value: r.value * s,
        abs_integral: r.abs_integral / (2.0 * PI),
        step: r.step,
        t_lo: r.t_lo,
        t_hi: r.t_hi,
        nodes: r.nodes,
    })
}

/// Symmetric-truncation value with its Richardson diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalValue {
    pub value: Complex64,
    pub truncated: Vec<(f64, Complex64)>,
    pub error_estimate: f64,
}

/// Neville extrapolation to x = 0 of samples (x_k, y_k).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[Complex64]) -> (Complex64, f64) {
    let n = xs.len();
    let mut table: Vec<Complex64> = ys.to_vec();
    let mut prev_last = table[n - 1];
    let mut err = f64::INFINITY;
    for level in 1..n {
        for i in 0..(n - level) {
            let (x0, x1) = (xs[i], xs[i + level]);
            table[i] = (table[i + 1] * x0 - table[i] * x1) / (x0 - x1);
        }
        let best = table[0];
        err = (best - prev_last).norm();
        prev_last = best;
    }
    (table[0], err)
}

pub fn principal_value_vertical<F>(
    f: &F,
    line: &VerticalLine,
    radius: f64,
    precision: &PrecisionConfig,
) -> Result<PrincipalValue>
where
    F: Fn(Complex64) -> Complex64,
{
    let g = |z: Complex64| f(line.point(z.re));
    let width = line.clearance;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    let mut lo = 0.0;
    let mut truncated = Vec::new();
    for k in 0..5 {
        let hi = radius * 2f64.powi(k);
        let panels = ((hi - lo) / width).ceil().max(1.0) as usize;
        let step = (hi - lo) / panels as f64;
        for j in 0..panels {
            let a = lo + j as f64 * step;
            let b = a + step;
            let (s1, a1) = rules::gl_segment(&g, Complex64::new(a, 0.0), Complex64::new(b, 0.0))?;
            let (s2, a2) = rules::gl_segment(&g, Complex64::new(-b, 0.0), Complex64::new(-a, 0.0))?;
            acc += s1 + s2;
            abs += a1 + a2;
        }
        lo = hi;
        truncated.push((hi, acc * (line.orientation.sign() / (2.0 * PI))));
        if truncated.len() * panels > precision.max_quad_nodes {
            break;
        }
    }
    let xs: Vec<f64> = truncated.iter().map(|(r, _)| 1.0 / r).collect();
    let ys: Vec<Complex64> = truncated.iter().map(|(_, v)| *v).collect();
    let (value, err) = extrapolate_to_zero(&xs, &ys);
    let scale = value.norm().max(abs / (2.0 * PI) * 1e-12).max(precision.abs_tol);
    if !(err.is_finite()) || err > 1e-4 * scale.max(value.norm()) {
        return Err(Error::Nonconvergence(format!(
            "principal value extrapolation unstable: estimate {value}, error {err:e}, partial values {ys:?}"
        )));
    }
    Ok(PrincipalValue { value, truncated, error_estimate: err })
}

/// Residue of f inside a circle, by the trapezoid rule with node doubling.
pub fn residue_at<F>(f: &F, center: Complex64, radius: f64, precision: &PrecisionConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut nodes = 32;
    let (mut prev, _) = NodeSet::circle(center, radius, nodes, 1.0).integrate(f);
    loop {
        nodes *= 2;
        let (next, abs) = NodeSet::circle(center, radius, nodes, 1.0).integrate(f);
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::Nonconvergence(format!("non-finite integrand near {center}")));
        }
        if (next - prev).norm() <= precision.rel_tol * abs.max(next.norm()) {
            return Ok(next);
        }
        if nodes >= 8192 {
            return Err(Error::Nonconvergence(format!("residue circle at {center} does not converge")));
        }
        prev = next;
    }
}

/// Circle enclosing a cluster of poles while keeping `obstacles` outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excision {
    pub center: Complex64,
    pub radius: f64,
}

pub fn cluster_circle(points: &[Complex64], obstacles: &[Complex64], line: Option<f64>) -> Result<Excision> {
    if points.is_empty() {
        return Err(Error::ContourConstruction("empty pole cluster".into()));
    }
    let center = points.iter().sum::<Complex64>() / points.len() as f64;
    let spread = points.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
    let mut reach = obstacles.iter().map(|p| (p - center).norm()).fold(f64::INFINITY, f64::min);
    if let Some(x) = line {
        reach = reach.min((center.re - x).abs());
    }
    if !reach.is_finite() {
        reach = 1.0;
    }
    if spread >= 0.8 * reach {
        return Err(Error::ContourConstruction(format!(
            "poles around {center} (spread {spread:.3e}) cannot be isolated from neighbours at distance {reach:.3e}"
        )));
    }
    let radius = if spread < 1e-3 * reach { 0.5 * reach } else { (spread * reach).sqrt() };
    Ok(Excision { center, radius })
}

/// Σ of residues of f at `points`, isolated from `obstacles` and the line.
pub fn residues_in_cluster<F>(
    f: &F,
    points: &[Complex64],
    obstacles: &[Complex64],
    line: Option<f64>,
    precision: &PrecisionConfig,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let e = cluster_circle(points, obstacles, line)?;
    residue_at(f, e.center, e.radius, precision)
}

/// Wynn's epsilon algorithm applied to partial sums; returns the last
/// even-column estimate.
fn wynn_epsilon(partial: &[Complex64]) -> Complex64 {
    let n = partial.len();
    if n < 3 {
        return partial[n - 1];
    }
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = partial.to_vec();
    let mut best = partial[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d.norm() == 0.0 {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + d.inv());
        }
        col += 1;
        if col % 2 == 0 {
            best = *next.last().unwrap();
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Sum of residues along a ladder, ∮ f dv / 2πi around each pole.
pub fn residue_sum<F>(f: &F, ladder: &ResidueLadder, precision: &PrecisionConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if ladder.max_terms == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let radius = if ladder.ladder.step.norm() > 0.0 { 0.25 * ladder.ladder.step.norm() } else { 0.25 };
    let mut partial = Vec::new();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last_estimate = None;
    let mut quiet = 0;
    let mut increment = f64::INFINITY;
    for r in 0..ladder.max_terms {
        sum += residue_at(f, ladder.ladder.point(r), radius, precision)?;
        partial.push(sum);
        if ladder.ladder.step.norm() == 0.0 {
            return Ok(sum);
        }
        let window = if partial.len() > 12 { &partial[partial.len() - 12..] } else { &partial[..] };
        let estimate = wynn_epsilon(window);
        if let Some(prev) = last_estimate {
            let prev: Complex64 = prev;
            increment = (estimate - prev).norm();
            if increment <= precision.rel_tol * estimate.norm().max(precision.abs_tol) {
                quiet += 1;
                if quiet >= 2 {
                    return Ok(estimate);
                }
            } else {
                quiet = 0;
            }
        }
        last_estimate = Some(estimate);
    }
    Err(Error::SlowDecay { increment })
}

/// ∫ f dv / 2πi along the snake path.
pub fn integrate_snake<F>(f: &F, snake: &SnakePath, precision: &PrecisionConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let width = snake.clearance;
    let mut total = Complex64::new(0.0, 0.0);
    let segment = |a: Complex64, b: Complex64| -> Result<Complex64> {
        let panels = ((b - a).norm() / width).ceil().max(1.0) as usize;
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..panels {
            let p = a + (b - a) * (j as f64 / panels as f64);
            let q = a + (b - a) * ((j + 1) as f64 / panels as f64);
            s += rules::gl_segment(f, p, q)?.0;
        }
        Ok(s)
    };
    let ray = |start: Complex64, direction: f64| -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        let mut pos = start;
        let mut w = width;
        let mut quiet = 0;
        for _ in 0..(precision.max_quad_nodes / rules::GL_ORDER) {
            let next = pos + Complex64::new(0.0, direction * w);
            let (v, a) = rules::gl_segment(f, pos, next)?;
            s += v;
            abs += a;
            if a <= 1e-3 * precision.rel_tol * abs {
                quiet += 1;
                if quiet >= 3 {
                    return Ok(s);
                }
            } else {
                quiet = 0;
            }
            pos = next;
            w *= 1.15;
        }
        Err(Error::Decay { magnitude: abs, radius: (pos - start).norm() })
    };
    let wp = &snake.waypoints;
    // from +i∞ down to the first waypoint
    total -= ray(wp[0], 1.0)?;
    for pair in wp.windows(2) {
        total += segment(pair[0], pair[1])?;
    }
    total += ray(wp[wp.len() - 1], -1.0)?;
    Ok(total / Complex64::new(0.0, 2.0 * PI))
}

/// Constant and 1/v coefficients of f at infinity along the vertical
/// direction through `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub constant: Complex64,
    pub c1: Complex64,
    pub constant_error: f64,
    pub c1_error: f64,
}

pub fn fit_tail<F>(f: &F, center: Complex64, radius: f64) -> Result<TailFit>
where
    F: Fn(Complex64) -> Complex64,
{
    let mut xs = Vec::new();
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for k in 0..4 {
        let r = radius * 2f64.powi(k);
        let up = f(center + Complex64::new(0.0, r));
        let down = f(center - Complex64::new(0.0, r));
        if !(up.re.is_finite() && up.im.is_finite() && down.re.is_finite() && down.im.is_finite()) {
            return Err(Error::NotSimpleTail(format!("non-finite samples at radius {r}")));
        }
        xs.push(1.0 / (r * r));
        odd.push((up - down) * Complex64::new(0.0, r) / 2.0);
        even.push((up + down) / 2.0);
    }
    let (c1, c1_error) = extrapolate_to_zero(&xs, &odd);
    let (constant, constant_error) = extrapolate_to_zero(&xs, &even);
    Ok(TailFit { constant, c1, constant_error, c1_error })
}

/// Clockwise half-circle at infinity on the given side: -c1/2 for a tail
/// c1/v + O(1/v^2). Both halves together give the residue at infinity -c1.
pub fn semicircle_infinity<F>(f: &F, side: Side, center: Complex64, radius: f64, precision: &PrecisionConfig) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let _ = side;
    let fit = fit_tail(f, center, radius)?;
    let scale = fit.c1.norm() / radius + precision.abs_tol;
    if fit.constant.norm() > 1e-6 * scale.max(1e-300) && fit.constant.norm() > precision.abs_tol {
        return Err(Error::NotSimpleTail(format!(
            "constant term {} at infinity (c1 = {})",
            fit.constant, fit.c1
        )));
    }
    Ok(-fit.c1 / 2.0)
}

/// Downward line integral of f_left + f_right, where f_left has poles only
/// left of the line and f_right only to the right, obtained from the arcs
/// at infinity. The O(1) tails of the two parts must cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcEvaluation {
    pub value: Complex64,
    pub left_poles_tail: TailFit,
    pub right_poles_tail: TailFit,
}

pub fn downward_line_by_arcs<FL, FR>(
    f_left_poles: &FL,
    f_right_poles: &FR,
    center: Complex64,
    radius: f64,
) -> Result<ArcEvaluation>
where
    FL: Fn(Complex64) -> Complex64,
    FR: Fn(Complex64) -> Complex64,
{
    let a = fit_tail(f_left_poles, center, radius)?;
    let b = fit_tail(f_right_poles, center, radius)?;
    let mismatch = (a.constant + b.constant).norm();
    if mismatch > 1e-6 * (a.constant.norm() + b.constant.norm()).max(1e-300) && mismatch > 1e-12 {
        return Err(Error::NotSimpleTail(format!(
            "constant tails do not cancel: {} + {}",
            a.constant, b.constant
        )));
    }
    // closing f_left_poles to the right and f_right_poles to the left
    let value = -a.c1 / 2.0 + b.c1 / 2.0;
    Ok(ArcEvaluation { value, left_poles_tail: a, right_poles_tail: b })
}

/// The vertical-line integral of Γ(a+s)Γ(b+s)Γ(c−s)Γ(d−s) ds/2πi and the two
/// closed forms that differ in the denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinBarnes {
    pub numeric: Complex64,
    /// Γ(a+c)Γ(a+d)Γ(b+c)Γ(b+d)/Γ(a+b+c+d)
    pub closed_standard: Complex64,
    /// same numerator over Γ(1+a+b+c+d)
    pub closed_shifted: Complex64,
}

impl MellinBarnes {
    /// Name of the closed form closer to the numeric value, with its residual.
    pub fn confirmed_variant(&self) -> (&'static str, f64) {
        let rs = crate::special_core::relative_residual(self.numeric, self.closed_standard);
        let rp = crate::special_core::relative_residual(self.numeric, self.closed_shifted);
        if rs <= rp {
            ("standard", rs)
        } else {
            ("shifted", rp)
        }
    }
}

pub fn mellin_barnes_4gamma(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    precision: &PrecisionConfig,
) -> Result<MellinBarnes> {
    let one = Complex64::new(1.0, 0.0);
    let book = PoleBook::new(
        vec![Ladder::new(-a, -one), Ladder::new(-b, -one)],
        vec![Ladder::new(c, one), Ladder::new(d, one)],
    );
    let line = VerticalLine::in_gap(Orientation::Up, &book, precision.max_ladder_terms).map_err(|e| match e {
        Error::ContourConstruction(_) => Error::Separation {
            pole: if (-a).re >= (-b).re { -a } else { -b },
            line: 0.5 * (c.re.min(d.re) + (-a.re).max(-b.re)),
        },
        other => other,
    })?;
    let integrand = |s: Complex64| -> Complex64 {
        match (log_gamma(a + s), log_gamma(b + s), log_gamma(c - s), log_gamma(d - s)) {
            (Ok(x), Ok(y), Ok(z), Ok(w)) => (x + y + z + w).exp(),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let numeric = integrate_vertical(&integrand, &line, precision)?.value;
    let numerator = gamma_fn(a + c)? * gamma_fn(a + d)? * gamma_fn(b + c)? * gamma_fn(b + d)?;
    let sum = a + b + c + d;
    Ok(MellinBarnes {
        numeric,
        closed_standard: numerator / gamma_fn(sum)?,
        closed_shifted: numerator / gamma_fn(sum + 1.0)?,
    })
}
