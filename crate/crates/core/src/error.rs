use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library reports. Numerical routines never hand back NaN
/// silently; they return one of these instead.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole at {location}")]
    Pole { location: Complex64 },

    #[error("ratio vanishes: denominator argument {location} is a pole")]
    Zero { location: Complex64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("moment constraint violated at q = {q} (mismatch {mismatch:e})")]
    Constraint { q: usize, mismatch: f64 },

    #[error("factor vanishes at lattice point {point:?}")]
    LatticeZero { point: Vec<i64> },

    #[error("outside the convergence domain: {0}")]
    Domain(String),

    #[error("trace condition (N-M)/2 = n-m fails for N={big_n}, M={big_m}, n={n}, m={m}")]
    Condition { big_n: usize, big_m: usize, n: usize, m: usize },

    #[error("product is not neutral: sum of phi exponents {phi_sum}, sum of eta exponents {eta_sum}")]
    Neutrality { phi_sum: i64, eta_sum: i64 },

    #[error("product still contains mu or phi_plus factors")]
    Unreduced,

    #[error("contour does not separate poles: {pole} lies on the wrong side of Re v = {line}")]
    Separation { pole: Complex64, line: f64 },

    #[error("integrand does not decay along the contour (|f| = {magnitude:e} at |t| = {radius})")]
    Decay { magnitude: f64, radius: f64 },

    #[error("no convergence: {0}")]
    Nonconvergence(String),

    #[error("residue ladder decays too slowly: last increment {increment:e}")]
    SlowDecay { increment: f64 },

    #[error("tail is not of the form c1/v: {0}")]
    NotSimpleTail(String),

    #[error("cannot build contour: {0}")]
    ContourConstruction(String),

    #[error("routes disagree: {value} vs {reference} (relative residual {residual:e})")]
    Agreement { value: Complex64, reference: Complex64, residual: f64 },

    #[error("real arguments must satisfy beta1 < beta2 < beta3")]
    Ordering,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
