//! C interface. Every function returns a `YtStatus`; on anything other than
//! `YT_STATUS_OK` the message is available from `yt_last_error` on the same
//! thread. Handles are opaque and owned by the caller.

use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use yangtrace::barnes_functions::{g_fn, g_bar_fn, g_tilde_fn};
use yangtrace::cli::{run_eval, CliError, ParamMap, RunSettings};
use yangtrace::contour_quadrature::mellin_barnes_4gamma;
use yangtrace::rmatrix::{r_full, r_scalar};
use yangtrace::special_core::gamma_fn;
use yangtrace::trace_evaluators::{general_trace, Sign, TraceSpec};
use yangtrace::{DeformParams, Error, PrecisionConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YtComplex {
    pub re: f64,
    pub im: f64,
}

impl From<YtComplex> for Complex64 {
    fn from(z: YtComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for YtComplex {
    fn from(z: Complex64) -> Self {
        YtComplex { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Pole = 3,
    Domain = 4,
    NoConvergence = 5,
    Contour = 6,
    Disagreement = 7,
    UnknownFormula = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YtGKind {
    Standard = 0,
    Tilde = 1,
    Bar = 2,
}

/// Deformation parameters and precision settings.
pub struct YtContext {
    params: DeformParams,
    precision: PrecisionConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(err: &Error) -> YtStatus {
    match err {
        Error::Pole { .. } | Error::Zero { .. } | Error::LatticeZero { .. } => YtStatus::Pole,
        Error::InvalidParameter(_)
        | Error::Constraint { .. }
        | Error::Condition { .. }
        | Error::Neutrality { .. }
        | Error::Unreduced
        | Error::Ordering
        | Error::Unsupported(_) => YtStatus::InvalidArgument,
        Error::Domain(_) | Error::Decay { .. } | Error::NotSimpleTail(_) => YtStatus::Domain,
        Error::Nonconvergence(_) | Error::SlowDecay { .. } => YtStatus::NoConvergence,
        Error::Separation { .. } | Error::ContourConstruction(_) => YtStatus::Contour,
        Error::Agreement { .. } => YtStatus::Disagreement,
    }
}

struct Failure(YtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match &e {
            CliError::UnknownFormula(_) | CliError::UnknownSuite(..) => YtStatus::UnknownFormula,
            CliError::Domain { source, .. } => status_of(source),
            _ => YtStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(YtStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, turning errors and panics into a status and a stored message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> YtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => YtStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            YtStatus::Panic
        }
    }
}

unsafe fn context<'a>(ctx: *const YtContext) -> Result<&'a YtContext, Failure> {
    ctx.as_ref().ok_or_else(|| null("context"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| Failure(YtStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

/// Message for the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn yt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a context with ħ > 0, complex γ and default precision.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn yt_context_new(hbar: f64, gamma_re: f64, gamma_im: f64, out: *mut *mut YtContext) -> YtStatus {
    guard(|| {
        let params = DeformParams::new(hbar, Complex64::new(gamma_re, gamma_im))?;
        let ctx = Box::new(YtContext { params, precision: PrecisionConfig::default() });
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(Box::into_raw(ctx));
        Ok(())
    })
}

/// # Safety
/// `ctx` must come from `yt_context_new` and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn yt_context_free(ctx: *mut YtContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Sets the relative tolerance of the adaptive quadratures.
///
/// # Safety
/// `ctx` must be a live context.
#[no_mangle]
pub unsafe extern "C" fn yt_context_set_rel_tol(ctx: *mut YtContext, rel_tol: f64) -> YtStatus {
    guard(|| {
        let ctx = ctx.as_mut().ok_or_else(|| null("context"))?;
        let precision = ctx.precision.with_rel_tol(rel_tol);
        precision.validate()?;
        ctx.precision = precision;
        Ok(())
    })
}

/// Γ(z).
///
/// # Safety
/// `out` must be valid for writing.
#[no_mangle]
pub unsafe extern "C" fn yt_gamma(z: YtComplex, out: *mut YtComplex) -> YtStatus {
    guard(|| write(out, gamma_fn(z.into())?.into()))
}

/// G, G̃ or Ḡ at z.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn yt_g_function(ctx: *const YtContext, kind: YtGKind, z: YtComplex, out: *mut YtComplex) -> YtStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let f = match kind {
            YtGKind::Standard => g_fn,
            YtGKind::Tilde => g_tilde_fn,
            YtGKind::Bar => g_bar_fn,
        };
        write(out, f(z.into(), &ctx.params, &ctx.precision)?.into())
    })
}

/// Scalar factor of the R-matrix.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn yt_r_scalar(ctx: *const YtContext, z: YtComplex, out: *mut YtComplex) -> YtStatus {
    guard(|| {
        let ctx = context(ctx)?;
        write(out, r_scalar(z.into(), &ctx.params)?.into())
    })
}

/// Full 4×4 R-matrix, row-major into `out[16]`.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writing 16 values.
#[no_mangle]
pub unsafe extern "C" fn yt_r_matrix(ctx: *const YtContext, z: YtComplex, out: *mut YtComplex) -> YtStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let m = r_full(z.into(), &ctx.params)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        for (i, v) in m.0.iter().flatten().enumerate() {
            out.add(i).write((*v).into());
        }
        Ok(())
    })
}

fn signs(values: &[c_int]) -> Result<Vec<Sign>, Failure> {
    values.iter().map(|&v| Sign::from_value(v).map_err(Failure::from)).collect()
}

/// Trace of a product of type II (rapidities `beta`, components `eps`) and
/// type I (spectral parameters `zeta`, components `nu`) vertex operators,
/// components given as +1 or −1.
///
/// # Safety
/// Each array must hold its stated number of elements; `out` must be valid
/// for writing.
#[no_mangle]
pub unsafe extern "C" fn yt_trace(
    ctx: *const YtContext,
    beta: *const YtComplex,
    eps: *const c_int,
    n_type_ii: usize,
    zeta: *const YtComplex,
    nu: *const c_int,
    n_type_i: usize,
    out: *mut YtComplex,
) -> YtStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let beta = slice(beta, n_type_ii, "beta")?;
        let eps = signs(slice(eps, n_type_ii, "eps")?)?;
        let zeta = slice(zeta, n_type_i, "zeta")?;
        let nu = signs(slice(nu, n_type_i, "nu")?)?;
        let type_ii = beta.iter().map(|&b| b.into()).zip(eps).collect();
        let type_i = zeta.iter().map(|&z| z.into()).zip(nu).collect();
        let spec = TraceSpec::new(type_ii, type_i, ctx.params)?;
        write(out, general_trace(&spec, &ctx.precision)?.value.into())
    })
}

/// ∫ Γ(a+s)Γ(b+s)Γ(c−s)Γ(d−s) ds/2πi along a separating vertical line.
///
/// # Safety
/// `ctx` must be a live context and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn yt_mellin_barnes(
    ctx: *const YtContext,
    a: YtComplex,
    b: YtComplex,
    c: YtComplex,
    d: YtComplex,
    out: *mut YtComplex,
) -> YtStatus {
    guard(|| {
        let ctx = context(ctx)?;
        let mb = mellin_barnes_4gamma(a.into(), b.into(), c.into(), d.into(), &ctx.precision)?;
        write(out, mb.numeric.into())
    })
}

/// Evaluates a registered formula as the command line does. `params_json` is
/// a JSON object of strings or numbers, or null for none. On success
/// `*out_json` receives the result record, to be released with
/// `yt_string_free`. A failing check is still `YT_STATUS_OK`; read "pass".
///
/// # Safety
/// String arguments must be NUL-terminated; `out_json` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn yt_eval_json(formula: *const c_char, params_json: *const c_char, out_json: *mut *mut c_char) -> YtStatus {
    guard(|| {
        let formula = text(formula, "formula")?;
        let mut params = ParamMap::new();
        if !params_json.is_null() {
            let raw: serde_json::Map<String, serde_json::Value> = serde_json::from_str(text(params_json, "params")?)
                .map_err(|e| Failure(YtStatus::InvalidArgument, format!("params: {e}")))?;
            for (k, v) in raw {
                let value = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(Failure(YtStatus::InvalidArgument, format!("parameter {k}: unsupported value {other}"))),
                };
                params.insert(k, value);
            }
        }
        let record = run_eval(formula, &params, &RunSettings::default())?;
        let json = serde_json::to_string(&record).map_err(|e| Failure(YtStatus::Panic, e.to_string()))?;
        let owned = CString::new(json).map_err(|e| Failure(YtStatus::Panic, e.to_string()))?;
        write(out_json, owned.into_raw())
    })
}

/// # Safety
/// `s` must come from `yt_eval_json` and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn yt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
