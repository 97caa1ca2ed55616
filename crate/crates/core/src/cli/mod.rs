//! Command-line surface: single evaluations, seeded verification suites and
//! parameter sweeps, emitted as JSON lines or CSV.

mod formulas;
mod suites;

pub use formulas::{formula_ids, lookup, Formula};
pub use suites::{suite_jobs, SUITES};

use crate::error::Error;
use crate::special_core::{relative_residual, PrecisionConfig};
use crate::trace_evaluators::Sign;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;
use thiserror::Error;

pub const SCHEMA: u32 = 1;
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerance of records that only report a value.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown formula id {0:?} (see `yangtrace list`)")]
    UnknownFormula(String),
    #[error("unknown suite {0:?} (available: {1})")]
    UnknownSuite(String, String),
    #[error("{formula}: missing parameter --{name}")]
    MissingParam { formula: String, name: String },
    #[error("{formula}: unknown parameter --{name}")]
    UnexpectedParam { formula: String, name: String },
    #[error("cannot parse --{name} {value:?}: {reason}")]
    BadValue { name: String, value: String, reason: String },
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("invalid job: {0}")]
    Job(String),
    #[error("{context}: {source}")]
    Domain {
        context: String,
        #[source]
        source: Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Named inputs as given on the command line, complex values as "a+bi".
pub type ParamMap = BTreeMap<String, String>;

pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty value".into());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|e| e.to_string());
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |t: &str| -> std::result::Result<f64, String> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|e| e.to_string()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|e| e.to_string())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

pub fn parse_sign(text: &str) -> std::result::Result<Sign, String> {
    match text.trim() {
        "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
        "-" | "-1" | "minus" => Ok(Sign::Minus),
        other => Err(format!("expected + or -, got {other:?}")),
    }
}

pub fn format_sign(sign: Sign) -> String {
    match sign {
        Sign::Plus => "+".into(),
        Sign::Minus => "-".into(),
    }
}

/// JSON shape of a complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// What a formula evaluation returns before it becomes a record.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: Complex64,
    pub reference: Option<Complex64>,
    pub residual: f64,
    pub tolerance: f64,
    pub contour: Option<String>,
    pub note: Option<String>,
}

impl Outcome {
    /// A bare value, nothing to compare against.
    pub fn value(value: Complex64) -> Self {
        Self { value, reference: None, residual: 0.0, tolerance: DEFAULT_TOL, contour: None, note: None }
    }

    /// Value against a reference, relative residual.
    pub fn compare(value: Complex64, reference: Complex64, tolerance: f64) -> Self {
        Self {
            value,
            reference: Some(reference),
            residual: relative_residual(value, reference),
            tolerance,
            contour: None,
            note: None,
        }
    }

    /// An identity check whose value is its own residual.
    pub fn check(residual: f64, tolerance: f64) -> Self {
        Self {
            value: Complex64::new(residual, 0.0),
            reference: Some(Complex64::new(0.0, 0.0)),
            residual,
            tolerance,
            contour: None,
            note: None,
        }
    }

    pub fn contour(mut self, contour: impl Into<String>) -> Self {
        self.contour = Some(contour.into());
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: u32,
    pub formula: String,
    pub params: ParamMap,
    pub value: Option<ComplexOut>,
    pub reference: Option<ComplexOut>,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub contour: Option<String>,
    pub note: Option<String>,
    pub elapsed_ms: Option<f64>,
}

impl ResultRecord {
    fn from_outcome(formula: &str, params: ParamMap, outcome: Outcome, tol: Option<f64>) -> Self {
        let tolerance = tol.unwrap_or(outcome.tolerance);
        let finite = outcome.residual.is_finite();
        Self {
            schema: SCHEMA,
            formula: formula.into(),
            params,
            value: Some(outcome.value.into()),
            reference: outcome.reference.map(Into::into),
            residual: finite.then_some(outcome.residual),
            tolerance,
            pass: finite && outcome.residual < tolerance,
            contour: outcome.contour,
            note: outcome.note,
            elapsed_ms: None,
        }
    }

    fn failed(formula: &str, params: ParamMap, tolerance: f64, error: &CliError) -> Self {
        Self {
            schema: SCHEMA,
            formula: formula.into(),
            params,
            value: None,
            reference: None,
            residual: None,
            tolerance,
            pass: false,
            contour: None,
            note: Some(format!("error: {error}")),
            elapsed_ms: None,
        }
    }
}

/// Settings shared by every record of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct RunSettings {
    pub precision: PrecisionConfig,
    /// Overrides the per-formula tolerance when set.
    pub tol: Option<f64>,
    /// Fill elapsed_ms; off by default so output is byte-stable.
    pub timing: bool,
}


/// One evaluation. Domain errors are returned, not recorded.
pub fn run_eval(formula: &str, params: &ParamMap, settings: &RunSettings) -> CliResult<ResultRecord> {
    let f = lookup(formula)?;
    let start = Instant::now();
    let full = f.complete(params)?;
    let outcome = f.evaluate(&full, &settings.precision)?;
    let mut record = ResultRecord::from_outcome(f.id, full, outcome, settings.tol);
    if settings.timing {
        record.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(record)
}

/// Like `run_eval`, but errors become failed records.
pub fn run_recorded(formula: &str, params: &ParamMap, settings: &RunSettings) -> ResultRecord {
    let start = Instant::now();
    let mut record = match run_eval(formula, params, settings) {
        Ok(r) => r,
        Err(e) => {
            let id = lookup(formula).map(|f| f.id).unwrap_or(formula);
            ResultRecord::failed(id, params.clone(), settings.tol.unwrap_or(DEFAULT_TOL), &e)
        }
    };
    if settings.timing {
        record.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    record
}

/// Evaluates jobs on all cores; output order is the job order.
pub fn run_jobs(jobs: &[(String, ParamMap)], settings: &RunSettings) -> Vec<ResultRecord> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<ResultRecord>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= jobs.len() {
                    break;
                }
                let record = run_recorded(&jobs[k].0, &jobs[k].1, settings);
                *slots[k].lock().expect("record slot") = Some(record);
            });
        }
    });
    slots.into_iter().map(|s| s.into_inner().expect("record slot").expect("job ran")).collect()
}

pub fn run_verify(suite: &str, seed: u64, settings: &RunSettings) -> CliResult<Vec<ResultRecord>> {
    let jobs = suite_jobs(suite, seed)?;
    Ok(run_jobs(&jobs, settings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub name: String,
    pub start: String,
    pub stop: String,
    pub count: usize,
}

impl Sweep {
    /// "name:start:stop:count".
    pub fn parse(text: &str) -> CliResult<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::Sweep(format!("expected name:start:stop:count, got {text:?}")));
        }
        let count = parts[3].parse::<usize>().map_err(|e| CliError::Sweep(e.to_string()))?;
        Ok(Self { name: parts[0].into(), start: parts[1].into(), stop: parts[2].into(), count })
    }

    pub fn values(&self) -> CliResult<Vec<String>> {
        let parse = |s: &str| parse_complex(s).map_err(|reason| CliError::Sweep(format!("{s:?}: {reason}")));
        let (a, b) = (parse(&self.start)?, parse(&self.stop)?);
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(CliError::Sweep("bounds must be finite".into()));
        }
        if self.count == 0 {
            return Err(CliError::Sweep("count must be at least 1".into()));
        }
        if self.count == 1 {
            return Ok(vec![format_complex(a)]);
        }
        let n = (self.count - 1) as f64;
        Ok((0..self.count).map(|k| format_complex(a + (b - a) * (k as f64 / n))).collect())
    }
}

pub fn run_table(formula: &str, params: &ParamMap, sweep: &Sweep, settings: &RunSettings) -> CliResult<Vec<ResultRecord>> {
    lookup(formula)?;
    let jobs: Vec<(String, ParamMap)> = sweep
        .values()?
        .into_iter()
        .map(|v| {
            let mut p = params.clone();
            p.insert(sweep.name.clone(), v);
            (formula.to_string(), p)
        })
        .collect();
    Ok(run_jobs(&jobs, settings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// JSON lines, or CSV with the record columns flattened.
pub fn render(records: &[ResultRecord], format: Format) -> CliResult<String> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in records {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "schema", "formula", "params", "value_re", "value_im", "reference_re", "reference_im", "residual",
                "tolerance", "pass", "contour", "note", "elapsed_ms",
            ])?;
            let num = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
            for r in records {
                let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                w.write_record([
                    r.schema.to_string(),
                    r.formula.clone(),
                    params.join(";"),
                    num(r.value.map(|z| z.re)),
                    num(r.value.map(|z| z.im)),
                    num(r.reference.map(|z| z.re)),
                    num(r.reference.map(|z| z.im)),
                    num(r.residual),
                    format!("{:?}", r.tolerance),
                    r.pass.to_string(),
                    r.contour.clone().unwrap_or_default(),
                    r.note.clone().unwrap_or_default(),
                    num(r.elapsed_ms),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn exit_code(records: &[ResultRecord]) -> i32 {
    if records.iter().all(|r| r.pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobCommand {
    Eval,
    Verify,
    Table,
    Trace,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PrecisionOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_quad_nodes: Option<usize>,
    pub max_ladder_terms: Option<usize>,
    pub product_truncation: Option<usize>,
}

impl PrecisionOverrides {
    pub fn apply(&self, mut p: PrecisionConfig) -> CliResult<PrecisionConfig> {
        if let Some(x) = self.rel_tol {
            p.rel_tol = x;
        }
        if let Some(x) = self.abs_tol {
            p.abs_tol = x;
        }
        if let Some(x) = self.max_quad_nodes {
            p.max_quad_nodes = x;
        }
        if let Some(x) = self.max_ladder_terms {
            p.max_ladder_terms = x;
        }
        if let Some(x) = self.product_truncation {
            p.product_truncation = x;
        }
        p.validate().map_err(|e| CliError::Domain { context: "precision".into(), source: e })?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    pub path: Option<PathBuf>,
}

/// A complete run description, readable from a JSON job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: JobCommand,
    /// Formula id, or suite name for `verify`.
    #[serde(default)]
    pub target: String,
    #[serde(default, deserialize_with = "loose_params")]
    pub params: ParamMap,
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub precision: PrecisionOverrides,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Parameter values may be JSON numbers or strings.
fn loose_params<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ParamMap, D::Error> {
    let raw = BTreeMap::<String, serde_json::Value>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => Ok((k, s)),
            serde_json::Value::Number(n) => Ok((k, n.to_string())),
            other => Err(serde::de::Error::custom(format!("parameter {k}: unsupported value {other}"))),
        })
        .collect()
}

pub fn run_job(job: &JobSpec, timing: bool) -> CliResult<Vec<ResultRecord>> {
    let settings = RunSettings { precision: job.precision.apply(PrecisionConfig::default())?, tol: job.tol, timing };
    if let Some(t) = job.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Job(format!("tolerance must be positive, got {t}")));
        }
    }
    match job.command {
        JobCommand::Eval => Ok(vec![run_eval(&job.target, &job.params, &settings)?]),
        JobCommand::Trace => Ok(vec![run_eval("general_trace", &job.params, &settings)?]),
        JobCommand::Verify => run_verify(&job.target, job.seed, &settings),
        JobCommand::Table => {
            let sweep = job.sweep.as_ref().ok_or_else(|| CliError::Job("table needs a sweep".into()))?;
            run_table(&job.target, &job.params, sweep, &settings)
        }
    }
}

pub fn write_output(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "yangtrace", version, about = "Evaluate and cross-check G-functions, R-matrix, trace formulas and difference identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one formula; parameters as --name value (complex as a+bi)
    Eval {
        formula: String,
        #[command(flatten)]
        options: Options,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--PARAM VALUE")]
        params: Vec<String>,
    },
    /// Run a named verification suite
    Verify {
        suite: Option<String>,
        #[arg(long = "suite", value_name = "SUITE")]
        suite_flag: Option<String>,
        #[command(flatten)]
        options: Options,
    },
    /// Sweep one parameter of a formula
    Table {
        formula: String,
        /// name:start:stop:count
        #[arg(long)]
        sweep: String,
        #[command(flatten)]
        options: Options,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--PARAM VALUE")]
        params: Vec<String>,
    },
    /// Evaluate a general trace: --ii "β:±,β:±" --i "ζ:±,ζ:±"
    Trace {
        #[command(flatten)]
        options: Options,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--PARAM VALUE")]
        params: Vec<String>,
    },
    /// Run a JSON job file
    Job {
        path: PathBuf,
        #[arg(long)]
        timing: bool,
    },
    /// List formula ids and suites
    List,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long)]
    pub hbar: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    /// Pass threshold on the residual, overriding the formula default
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative tolerance of the numerical routines
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall time per item (output is then not byte-stable)
    #[arg(long)]
    pub timing: bool,
}

/// Splits trailing "--name value" / "--name=value" tokens; shared options
/// that appear among them are applied to `options`.
fn split_params(tokens: &[String], options: &mut Options) -> CliResult<ParamMap> {
    let mut params = ParamMap::new();
    let mut k = 0;
    while k < tokens.len() {
        let token = &tokens[k];
        let Some(name) = token.strip_prefix("--") else {
            return Err(CliError::BadValue { name: token.clone(), value: String::new(), reason: "expected --name".into() });
        };
        if name == "timing" {
            options.timing = true;
            k += 1;
            continue;
        }
        let (name, value) = match name.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = tokens.get(k + 1).ok_or_else(|| CliError::BadValue {
                    name: name.into(),
                    value: String::new(),
                    reason: "missing value".into(),
                })?;
                k += 1;
                (name.to_string(), v.clone())
            }
        };
        k += 1;
        let bad = |reason: String| CliError::BadValue { name: name.clone(), value: value.clone(), reason };
        match name.as_str() {
            "hbar" => options.hbar = Some(value),
            "gamma" => options.gamma = Some(value),
            "tol" => options.tol = Some(value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?),
            "rel-tol" => options.rel_tol = Some(value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?),
            "seed" => options.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "format" => options.format = Format::from_str(&value, true).map_err(bad)?,
            "out" => options.out = Some(PathBuf::from(value)),
            _ => {
                params.insert(name, value);
            }
        }
    }
    Ok(params)
}

fn settings_of(options: &Options) -> CliResult<RunSettings> {
    let mut precision = PrecisionConfig::default();
    if let Some(r) = options.rel_tol {
        precision.rel_tol = r;
    }
    precision.validate().map_err(|e| CliError::Domain { context: "precision".into(), source: e })?;
    if let Some(t) = options.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::BadValue { name: "tol".into(), value: t.to_string(), reason: "must be positive".into() });
        }
    }
    Ok(RunSettings { precision, tol: options.tol, timing: options.timing })
}

fn with_deform(mut params: ParamMap, options: &Options) -> ParamMap {
    if let Some(h) = &options.hbar {
        params.insert("hbar".into(), h.clone());
    }
    if let Some(g) = &options.gamma {
        params.insert("gamma".into(), g.clone());
    }
    params
}

fn list_text() -> String {
    let mut out = String::from("formulas:\n");
    for f in formulas::FORMULAS {
        out.push_str(&format!("  {:<34} {}\n", f.id, f.about));
        if !f.params.is_empty() {
            out.push_str(&format!("  {:<34}   params: {}\n", "", f.params.join(", ")));
        }
    }
    out.push_str("suites:\n");
    for s in SUITES {
        out.push_str(&format!("  {s}\n"));
    }
    out.push_str("  all\n");
    out
}

fn execute(cli: Cli) -> CliResult<i32> {
    let (records, format, out) = match cli.command {
        Command::List => {
            write_output(&list_text(), None)?;
            return Ok(EXIT_PASS);
        }
        Command::Eval { formula, mut options, params } => {
            let params = split_params(&params, &mut options)?;
            let settings = settings_of(&options)?;
            let params = with_deform(params, &options);
            (vec![run_eval(&formula, &params, &settings)?], options.format, options.out)
        }
        Command::Trace { mut options, params } => {
            let params = split_params(&params, &mut options)?;
            let settings = settings_of(&options)?;
            let params = with_deform(params, &options);
            (vec![run_eval("general_trace", &params, &settings)?], options.format, options.out)
        }
        Command::Table { formula, sweep, mut options, params } => {
            let params = split_params(&params, &mut options)?;
            let settings = settings_of(&options)?;
            let params = with_deform(params, &options);
            let sweep = Sweep::parse(&sweep)?;
            (run_table(&formula, &params, &sweep, &settings)?, options.format, options.out)
        }
        Command::Verify { suite, suite_flag, options } => {
            let name = suite_flag.or(suite).unwrap_or_else(|| "all".into());
            let settings = settings_of(&options)?;
            (run_verify(&name, options.seed, &settings)?, options.format, options.out)
        }
        Command::Job { path, timing } => {
            let job: JobSpec = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
            let records = run_job(&job, timing)?;
            (records, job.output.format, job.output.path.clone())
        }
    };
    write_output(&render(&records, format)?, out.as_deref())?;
    Ok(exit_code(&records))
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("yangtrace: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_strings() {
        assert_eq!(parse_complex("0.3-0.2i").unwrap(), Complex64::new(0.3, -0.2));
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2.5e+1i").unwrap(), Complex64::new(1e-3, 25.0));
        assert_eq!(parse_complex(" -1.5 + 0.5i ").unwrap(), Complex64::new(-1.5, 0.5));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn sweep_values() {
        let s = Sweep::parse("z:0.1:0.9:9").unwrap();
        let v = s.values().unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], "0.1");
        assert_eq!(v[8], "0.9");
        let one = Sweep::parse("z:0.5:0.9:1").unwrap().values().unwrap();
        assert_eq!(one, vec!["0.5".to_string()]);
        assert!(Sweep::parse("z:0.1:0.9:0").unwrap().values().is_err());
        assert!(Sweep::parse("z:0.1:inf:3").unwrap().values().is_err());
        assert!(Sweep::parse("z:0.1").is_err());
    }

    #[test]
    fn trailing_params_and_shared_options() {
        let mut o = Cli::try_parse_from(["yangtrace", "eval", "g", "--hbar", "1", "--z", "1", "--gamma", "2", "--tol=1e-6"]).unwrap();
        let Command::Eval { ref mut options, ref params, .. } = o.command else { panic!() };
        let p = split_params(params, options).unwrap();
        assert_eq!(p.get("z").map(String::as_str), Some("1"));
        assert_eq!(options.hbar.as_deref(), Some("1"));
        assert_eq!(options.gamma.as_deref(), Some("2"));
        assert_eq!(options.tol, Some(1e-6));
    }

    #[test]
    fn eval_records() {
        let s = RunSettings::default();
        let p: ParamMap = [("z", "1"), ("hbar", "1"), ("gamma", "2")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let r = run_eval("g", &p, &s).unwrap();
        assert!((r.value.unwrap().re - 1.0).abs() < 1e-8 && r.pass);
        let p: ParamMap = [("z".to_string(), "0".to_string())].into();
        let r = run_eval("r_scalar", &p, &s).unwrap();
        assert_eq!(r.value.unwrap(), ComplexOut { re: 1.0, im: 0.0 });
        assert!(matches!(run_eval("no_such_formula", &p, &s), Err(CliError::UnknownFormula(_))));
        let bad: ParamMap = [("q".to_string(), "0".to_string())].into();
        assert!(matches!(run_eval("r_scalar", &bad, &s), Err(CliError::UnexpectedParam { .. })));
    }

    #[test]
    fn vanishing_type_ii_at_free_point() {
        let p: ParamMap = [("eps1", "+"), ("beta1", "0.3"), ("beta2", "0"), ("gamma", "2"), ("hbar", "1")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let r = run_eval("trace_type_ii_2pt", &p, &RunSettings::default()).unwrap();
        assert_eq!(r.value.unwrap(), ComplexOut { re: 0.0, im: 0.0 });
        assert!(r.note.unwrap().contains("identically zero"));
    }

    #[test]
    fn pass_follows_residual() {
        let r = ResultRecord::from_outcome("x", ParamMap::new(), Outcome::check(1e-3, 1e-2), None);
        assert!(r.pass);
        let r = ResultRecord::from_outcome("x", ParamMap::new(), Outcome::check(1e-3, 1e-2), Some(1e-4));
        assert!(!r.pass);
        let r = ResultRecord::from_outcome("x", ParamMap::new(), Outcome::check(f64::NAN, 1e-2), None);
        assert!(!r.pass && r.residual.is_none());
    }

    #[test]
    fn csv_and_json_columns() {
        let r = ResultRecord::from_outcome("x", [("a".to_string(), "1".to_string())].into(), Outcome::check(0.5, 1.0), None);
        let csv = render(std::slice::from_ref(&r), Format::Csv).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("schema,formula,params,value_re"));
        assert!(lines.next().unwrap().starts_with("1,x,a=1,0.5,0.0,0.0,0.0,0.5,1.0,true"));
        let json = render(std::slice::from_ref(&r), Format::Json).unwrap();
        let back: ResultRecord = serde_json::from_str(json.trim()).unwrap();
        assert_eq!(back, r);
        assert!(json.contains("\"schema\":1"));
    }

    #[test]
    fn job_file_round_trip() {
        let job: JobSpec = serde_json::from_str(
            r#"{"command":"table","target":"unitarity","params":{"hbar":1},"sweep":{"name":"z","start":"0.1","stop":"0.9","count":3}}"#,
        )
        .unwrap();
        let records = run_job(&job, false).unwrap();
        assert_eq!(records.len(), 3);
        assert!(records.iter().all(|r| r.pass));
        assert_eq!(exit_code(&records), EXIT_PASS);
    }

    proptest! {
        #[test]
        fn complex_format_round_trips(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let z = Complex64::new(re, im);
            prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }
}
