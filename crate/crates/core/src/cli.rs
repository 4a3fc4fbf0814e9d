//! Command-line front end behind the `soliton` binary.
//!
//! Every subcommand reads the same option set; values come from flags, then
//! from an optional `--config` file of `key = value` lines, then from
//! defaults. Stdout carries data only. Diagnostics go to stderr at the
//! level selected by `SOLITON_LOG` (`quiet`, `info` or `debug`).

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::geometry::{build_warped_metric, build_with_spacing, geometry_report, WarpedMetric};
use crate::numeric::fmt17;
use crate::ode::profile::{ProfileSummary, SMOOTH_ORIGIN_TOL};
use crate::ode::{integrate_profile, make_params, Profile};
use crate::taxonomy::{catalog, classify, CatalogEntry, Family, FamilyLabel};
use crate::variational::{energy, variation_report, VariationField, DEFAULT_EPS};
use crate::verify::{pointwise, smooth_extension_check, soliton_residual};

/// Integration tolerance when `--tol` is absent.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Grid spacing of catalog metrics when `--samples` is absent.
pub const DEFAULT_H: f64 = 1e-3;
const DEFAULT_SAMPLES: usize = 1001;
/// How far past `t0` profiles are integrated before a metric is built.
const METRIC_T_SPAN: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Integrate,
    Classify,
    Metric,
    Report,
    Verify,
    Energy,
    Catalog,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Action::Integrate => "integrate",
            Action::Classify => "classify",
            Action::Metric => "metric",
            Action::Report => "report",
            Action::Verify => "verify",
            Action::Energy => "energy",
            Action::Catalog => "catalog",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LogLevel {
    Quiet,
    Info,
    Debug,
}

impl LogLevel {
    /// Level named by `SOLITON_LOG`; unset or unrecognised means quiet.
    pub fn from_env() -> Self {
        match std::env::var("SOLITON_LOG").as_deref().map(str::trim) {
            Ok("info") => LogLevel::Info,
            Ok("debug") => LogLevel::Debug,
            _ => LogLevel::Quiet,
        }
    }
}

/// Fully resolved options of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub action: Action,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub a0: Option<f64>,
    pub t0: f64,
    pub family: Option<Family>,
    pub nu: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub r_range: Option<(f64, f64)>,
    pub samples: Option<usize>,
    pub tol: f64,
    pub eps: f64,
    pub phi_amp: f64,
    pub psi_amp: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(
    name = "soliton",
    version,
    about = "Rotationally symmetric gradient Ricci solitons on surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the profile ODE from (t0, a0) over --window.
    Integrate(Opts),
    /// Assign a profile to its family.
    Classify(Opts),
    /// Sample the warped metric r, b, b', K.
    Metric(Opts),
    /// Completeness, curvature range and ends.
    Report(Opts),
    /// Soliton residuals of a sampled metric.
    Verify(Opts),
    /// Energy and its first variation against the finite-difference oracle.
    Energy(Opts),
    /// Canonical family representatives.
    Catalog(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Soliton constant lambda.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    lambda: Option<f64>,
    /// Constant mu of the profile ODE, non-zero.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    mu: Option<f64>,
    /// Initial value a(t0) > 0.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    a0: Option<f64>,
    /// Initial time, 0 when absent.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    t0: Option<f64>,
    /// Family tag such as g1, g4+, G7.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter; the family's middle sample when absent.
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    nu: Option<f64>,
    /// `lo,hi`: t-window for integrate, r-window of the variation for energy.
    #[arg(long, allow_hyphen_values = true, value_parser = pair)]
    window: Option<(f64, f64)>,
    /// `lo,hi`: radial range of the sampled metric.
    #[arg(long = "r-range", allow_hyphen_values = true, value_parser = pair)]
    r_range: Option<(f64, f64)>,
    /// Number of output samples.
    #[arg(long, value_parser = positive_count)]
    samples: Option<usize>,
    /// Relative integration tolerance [default: 1e-10].
    #[arg(long, value_parser = positive)]
    tol: Option<f64>,
    /// Step of the finite-difference energy oracle.
    #[arg(long, value_parser = positive)]
    eps: Option<f64>,
    /// Amplitude of the conformal part of the energy variation.
    #[arg(long = "phi-amp", allow_hyphen_values = true, value_parser = finite)]
    phi_amp: Option<f64>,
    /// Amplitude of the trace-free part of the energy variation.
    #[arg(long = "psi-amp", allow_hyphen_values = true, value_parser = finite)]
    psi_amp: Option<f64>,
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("`{s}` must be positive"))
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split([',', ':']).collect();
    if parts.len() != 2 {
        return Err(format!("`{s}` is not a pair `lo,hi`"));
    }
    let (lo, hi) = (finite(parts[0])?, finite(parts[1])?);
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("`{s}` needs lo < hi"))
    }
}

/// Why an invocation did not produce output.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments; exit code 1.
    Usage(String),
    /// A library call failed; exit code 2 when the failure is numerical.
    Library { operation: &'static str, error: Error },
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Library { error, .. } if error.is_numerical() => 2,
            Failure::Library { .. } => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Library { operation, error } => write!(f, "{operation} failed: {error}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn lib<T>(operation: &'static str, r: crate::Result<T>) -> Result<T, Failure> {
    r.map_err(|error| Failure::Library { operation, error })
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", no + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn merge(sub: Action, mut o: Opts) -> Result<RunConfig, String> {
    if let Some(path) = o.config.take() {
        let text = fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (key, value) in parse_config(&text)? {
            let bad = |e: String| format!("config key `{key}`: {e}");
            match key.as_str() {
                "lambda" => fill(&mut o.lambda, || finite(&value).map_err(bad))?,
                "mu" => fill(&mut o.mu, || finite(&value).map_err(bad))?,
                "a0" => fill(&mut o.a0, || finite(&value).map_err(bad))?,
                "t0" => fill(&mut o.t0, || finite(&value).map_err(bad))?,
                "family" => fill(&mut o.family, || Ok(value.clone()))?,
                "nu" => fill(&mut o.nu, || finite(&value).map_err(bad))?,
                "window" => fill(&mut o.window, || pair(&value).map_err(bad))?,
                "r-range" => fill(&mut o.r_range, || pair(&value).map_err(bad))?,
                "samples" => fill(&mut o.samples, || positive_count(&value).map_err(bad))?,
                "tol" => fill(&mut o.tol, || positive(&value).map_err(bad))?,
                "eps" => fill(&mut o.eps, || positive(&value).map_err(bad))?,
                "phi-amp" => fill(&mut o.phi_amp, || finite(&value).map_err(bad))?,
                "psi-amp" => fill(&mut o.psi_amp, || finite(&value).map_err(bad))?,
                "format" => fill(&mut o.format, || {
                    Format::from_str(&value, true).map_err(bad)
                })?,
                "out" => fill(&mut o.out, || Ok(PathBuf::from(&value)))?,
                _ => return Err(format!("unknown config key `{key}`")),
            }
        }
    }
    let family = o
        .family
        .as_deref()
        .map(str::parse::<Family>)
        .transpose()
        .map_err(|e| e.to_string())?;
    if let Some(nu) = o.nu {
        if !(nu > 0.0) {
            return Err(format!("--nu must be positive, got {nu}"));
        }
    }
    Ok(RunConfig {
        action: sub,
        lambda: o.lambda,
        mu: o.mu,
        a0: o.a0,
        t0: o.t0.unwrap_or(0.0),
        family,
        nu: o.nu,
        window: o.window,
        r_range: o.r_range,
        samples: o.samples,
        tol: o.tol.unwrap_or(DEFAULT_TOL),
        eps: o.eps.unwrap_or(DEFAULT_EPS),
        phi_amp: o.phi_amp.unwrap_or(0.0),
        psi_amp: o.psi_amp.unwrap_or(0.1),
        format: o.format.unwrap_or_default(),
        out: o.out,
    })
}

fn fill<T>(slot: &mut Option<T>, value: impl FnOnce() -> Result<T, String>) -> Result<(), String> {
    if slot.is_none() {
        *slot = Some(value()?);
    }
    Ok(())
}

/// What `argv` asks for: a run, or text clap produced itself (help,
/// version).
#[derive(Debug)]
pub enum Parsed {
    Run(RunConfig),
    Print(String),
}

/// Parse `argv` (including the program name) into a [`RunConfig`].
pub fn parse_args<I, S>(argv: I) -> Result<Parsed, Failure>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Print(e.to_string())),
                _ => Err(Failure::Usage(e.to_string())),
            };
        }
    };
    let (sub, opts) = match cli.command {
        Command::Integrate(o) => (Action::Integrate, o),
        Command::Classify(o) => (Action::Classify, o),
        Command::Metric(o) => (Action::Metric, o),
        Command::Report(o) => (Action::Report, o),
        Command::Verify(o) => (Action::Verify, o),
        Command::Energy(o) => (Action::Energy, o),
        Command::Catalog(o) => (Action::Catalog, o),
    };
    merge(sub, opts).map(Parsed::Run).map_err(Failure::Usage)
}

/// Entry point of the binary: returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock(), LogLevel::from_env())
}

/// [`run`] with explicit output streams.
pub fn run_with_io<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write, log: LogLevel) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let result = match parse_args(argv) {
        Ok(Parsed::Print(text)) => {
            let _ = out.write_all(text.as_bytes());
            return 0;
        }
        Ok(Parsed::Run(cfg)) => {
            if log >= LogLevel::Debug {
                let _ = writeln!(err, "[debug] {cfg:?}");
            }
            execute(&cfg, log, err).and_then(|text| emit(&cfg, &text, out))
        }
        Err(f) => Err(f),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{f}");
            if let Failure::Usage(_) = f {
                let _ = writeln!(err, "run `soliton --help` for usage");
            }
            f.exit_code()
        }
    }
}

fn emit(cfg: &RunConfig, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

/// Run one resolved command and return the text for stdout.
pub fn execute(cfg: &RunConfig, log: LogLevel, err: &mut dyn Write) -> Result<String, Failure> {
    let info = |err: &mut dyn Write, msg: &str| {
        if log >= LogLevel::Info {
            let _ = writeln!(err, "[info] {msg}");
        }
    };
    info(err, &format!("{} started", cfg.action));
    let text = match cfg.action {
        Action::Integrate => cmd_integrate(cfg)?,
        Action::Classify => cmd_classify(cfg)?,
        Action::Metric => cmd_metric(cfg)?,
        Action::Report => cmd_report(cfg)?,
        Action::Verify => cmd_verify(cfg)?,
        Action::Energy => cmd_energy(cfg)?,
        Action::Catalog => cmd_catalog(cfg)?,
    };
    info(err, &format!("{} finished, {} bytes", cfg.action, text.len()));
    Ok(text)
}

/// Where a profile comes from: explicit initial data or a catalog entry.
enum Source {
    Initial(Profile),
    Entry(Box<CatalogEntry>),
}

impl Source {
    fn profile(&self) -> &Profile {
        match self {
            Source::Initial(p) => p,
            Source::Entry(e) => &e.profile,
        }
    }
}

fn initial_profile(cfg: &RunConfig) -> Result<Profile, Failure> {
    let missing: Vec<&str> = [("--lambda", cfg.lambda), ("--mu", cfg.mu), ("--a0", cfg.a0)]
        .iter()
        .filter(|(_, v)| v.is_none())
        .map(|(n, _)| *n)
        .collect();
    if !missing.is_empty() {
        return usage(format!("{} requires {}", cfg.action, missing.join(", ")));
    }
    let params = lib("make_params", make_params(cfg.lambda.unwrap(), cfg.mu.unwrap()))?;
    // --window is a t-window only for integrate and classify; metrics need
    // the profile far enough out to cover the requested radii
    let window = match cfg.action {
        Action::Integrate | Action::Classify => cfg.window.unwrap_or((cfg.t0, cfg.t0 + 1.0)),
        _ => (cfg.t0.min(0.0), cfg.t0 + METRIC_T_SPAN),
    };
    lib(
        "integrate_profile",
        integrate_profile(params, cfg.t0, cfg.a0.unwrap(), window, cfg.tol),
    )
}

fn source(cfg: &RunConfig) -> Result<Source, Failure> {
    match cfg.family {
        Some(family) => {
            if cfg.lambda.is_some() || cfg.mu.is_some() || cfg.a0.is_some() {
                return usage("give either --family/--nu or --lambda/--mu/--a0, not both");
            }
            let nu = cfg.nu.unwrap_or(family.info().sample_nu[1]);
            Ok(Source::Entry(Box::new(lib("catalog", catalog(family, nu))?)))
        }
        None => Ok(Source::Initial(initial_profile(cfg)?)),
    }
}

/// The metric requested by `cfg`. Catalog entries default to their
/// reference window at spacing [`DEFAULT_H`]. Initial data need
/// `--r-range`; the metric is anchored at `r(0) = 0` when it closes up at
/// the origin and at `r(b(t0)) = 0` otherwise.
fn metric_of(cfg: &RunConfig, src: &Source) -> Result<WarpedMetric, Failure> {
    let build = |profile: &Profile, anchor: (f64, f64), range: (f64, f64)| match cfg.samples {
        Some(n) => build_warped_metric(profile, anchor, range, n),
        None => build_with_spacing(profile, anchor, range, DEFAULT_H),
    };
    match src {
        Source::Entry(e) => {
            let range = cfg.r_range.unwrap_or((0.0, e.reference.r_hi));
            lib("build_warped_metric", build(&e.profile, (0.0, e.reference.b0), range))
        }
        Source::Initial(p) => {
            let Some(range) = cfg.r_range else {
                return usage(format!("{} from initial data requires --r-range", cfg.action));
            };
            let smooth = p.touches_origin()
                && p.value(0.0).map(|a| (a - 1.0).abs() <= SMOOTH_ORIGIN_TOL).unwrap_or(false);
            let profile = if smooth {
                lib("restrict_to_origin", p.restrict_to_origin())?
            } else {
                p.clone()
            };
            if !smooth && !(cfg.t0 > 0.0) {
                return usage("the metric needs --t0 > 0 unless a(0) = 1");
            }
            let b0 = if smooth { 0.0 } else { 2.0 * cfg.t0.sqrt() };
            let n = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
            lib("build_warped_metric", build_warped_metric(&profile, (0.0, b0), range, n))
        }
    }
}

fn cmd_integrate(cfg: &RunConfig) -> Result<String, Failure> {
    let p = initial_profile(cfg)?;
    match cfg.format {
        Format::Csv => Ok(p.to_csv(cfg.samples.unwrap_or(0))),
        Format::Json => {
            let rows: Vec<Value> = p
                .rows(cfg.samples.unwrap_or(0))
                .into_iter()
                .map(|(t, a, da)| json!({"t": t, "a": a, "dadt": da}))
                .collect();
            Ok(to_json(&json!({
                "profile": value(&ProfileSummary::from(&p)),
                "samples": rows,
            })))
        }
    }
}

fn label_json(label: &FamilyLabel) -> Value {
    let mut v = json!({"family": label.tag()});
    if let FamilyLabel::UnresolvedT0Sign { t0, uncertainty } = label {
        v["t0"] = extended(*t0);
        v["uncertainty"] = extended(*uncertainty);
    }
    v
}

fn cmd_classify(cfg: &RunConfig) -> Result<String, Failure> {
    let p = initial_profile(cfg)?;
    let label = classify(&p);
    match cfg.format {
        Format::Csv => Ok(format!("family\n{}\n", label.tag())),
        Format::Json => {
            let mut v = label_json(&label);
            v["profile"] = value(&ProfileSummary::from(&p));
            Ok(to_json(&v))
        }
    }
}

fn cmd_metric(cfg: &RunConfig) -> Result<String, Failure> {
    let src = source(cfg)?;
    let m = metric_of(cfg, &src)?;
    match cfg.format {
        Format::Csv => Ok(m.to_csv()),
        Format::Json => Ok(to_json(&json!({
            "params": value(&m.params),
            "h": m.h,
            "r": m.r,
            "b": m.b,
            "db_dr": m.b_prime,
            "K": m.k,
        }))),
    }
}

fn cmd_report(cfg: &RunConfig) -> Result<String, Failure> {
    let src = source(cfg)?;
    let p = src.profile();
    let report = lib("geometry_report", geometry_report(p, cfg.tol))?;
    let label = classify(p);
    match cfg.format {
        Format::Csv => {
            let v = value(&report);
            let mut s = String::from("key,value\n");
            s.push_str(&format!("family,{}\n", label.tag()));
            for key in ["complete_inner", "complete_outer", "complete", "curvature_sign"] {
                s.push_str(&format!("{key},{}\n", scalar(&v[key])));
            }
            s.push_str(&format!("K_inf,{}\nK_sup,{}\n", fmt17(report.k_inf), fmt17(report.k_sup)));
            for end in ["inner_end", "outer_end"] {
                for (k, x) in v[end].as_object().into_iter().flatten() {
                    s.push_str(&format!("{end}.{k},{}\n", scalar(x)));
                }
            }
            Ok(s)
        }
        Format::Json => {
            let mut v = label_json(&label);
            v["params"] = value(p.params());
            v["report"] = value(&report);
            Ok(to_json(&v))
        }
    }
}

fn cmd_verify(cfg: &RunConfig) -> Result<String, Failure> {
    let src = source(cfg)?;
    let m = metric_of(cfg, &src)?;
    let residuals = lib("soliton_residual", soliton_residual(&m))?;
    match cfg.format {
        Format::Csv => {
            let (points, _) = lib("soliton_residual", pointwise(&m))?;
            let mut s = String::from("r,tracefree,laplace,potential,killing\n");
            for p in points {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    fmt17(p.r),
                    fmt17(p.tracefree),
                    fmt17(p.laplace),
                    fmt17(p.potential),
                    fmt17(p.killing)
                ));
            }
            Ok(s)
        }
        Format::Json => {
            let mut v = json!({
                "params": value(&m.params),
                "residuals": value(&residuals),
                "max_residual": residuals.max(),
            });
            let profile = src.profile();
            v["smooth_extension"] = if profile.touches_origin() {
                value(&lib("smooth_extension_check", smooth_extension_check(profile))?)
            } else {
                Value::Null
            };
            Ok(to_json(&v))
        }
    }
}

fn cmd_energy(cfg: &RunConfig) -> Result<String, Failure> {
    let src = source(cfg)?;
    let m = metric_of(cfg, &src)?;
    let (r0, r1) = (m.r[0], m.r[m.len() - 1]);
    let window = cfg
        .window
        .unwrap_or((r0 + 0.1 * (r1 - r0), r1 - 0.1 * (r1 - r0)));
    let e = lib("energy", energy(&m, window))?;
    let v = lib("variation", VariationField::bump(&m, window, cfg.phi_amp, cfg.psi_amp))?;
    let rep = lib("variation_report", variation_report(&m, &v, cfg.eps))?;
    match cfg.format {
        Format::Csv => Ok(format!(
            "energy,analytic,finite_difference,eps,slope_estimate,noether_defect\n{},{},{},{},{},{}\n",
            fmt17(e),
            fmt17(rep.analytic),
            fmt17(rep.finite_difference),
            fmt17(rep.eps),
            fmt17(rep.slope_estimate),
            fmt17(rep.noether_defect)
        )),
        Format::Json => {
            let mut v = value(&rep);
            v["energy"] = extended(e);
            v["window"] = json!([window.0, window.1]);
            Ok(to_json(&v))
        }
    }
}

fn entry_json(e: &CatalogEntry, tol: f64) -> Result<Value, Failure> {
    let report = lib("geometry_report", geometry_report(&e.profile, tol))?;
    let mut v = value(e);
    v["family"] = json!(e.family.tag());
    v["info"] = value(&e.family.info());
    v["extends_over_origin"] = json!(e.extends_over_origin());
    v["report"] = value(&report);
    Ok(v)
}

fn cmd_catalog(cfg: &RunConfig) -> Result<String, Failure> {
    let families: Vec<Family> = match cfg.family {
        Some(f) => vec![f],
        None => Family::ALL.to_vec(),
    };
    let mut entries = Vec::new();
    for f in families {
        let nus = match cfg.nu {
            Some(nu) => vec![nu],
            None => f.info().sample_nu.to_vec(),
        };
        for nu in nus {
            entries.push(lib("catalog", catalog(f, nu))?);
        }
    }
    match cfg.format {
        Format::Csv => {
            let mut s = String::from(
                "family,nu,lambda,mu,complete,curvature_sign,K_inf,K_sup,inner_end,outer_end\n",
            );
            for e in &entries {
                let r = lib("geometry_report", geometry_report(&e.profile, cfg.tol))?;
                let rv = value(&r);
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    e.family.tag(),
                    fmt17(e.nu),
                    fmt17(e.params.lambda()),
                    fmt17(e.params.mu()),
                    r.complete,
                    scalar(&rv["curvature_sign"]),
                    fmt17(r.k_inf),
                    fmt17(r.k_sup),
                    scalar(&rv["inner_end"]["kind"]),
                    scalar(&rv["outer_end"]["kind"]),
                ));
            }
            Ok(s)
        }
        Format::Json => {
            let list = entries
                .iter()
                .map(|e| entry_json(e, cfg.tol))
                .collect::<Result<Vec<_>, _>>()?;
            if list.len() == 1 {
                Ok(to_json(&list[0]))
            } else {
                Ok(to_json(&Value::Array(list)))
            }
        }
    }
}

fn value<T: Serialize + ?Sized>(x: &T) -> Value {
    // serialization of library types cannot fail: no maps with non-string keys
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn extended(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt17(x))
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().map(fmt17).unwrap_or_else(|| n.to_string()),
        other => other.to_string(),
    }
}

/// Compact JSON with every float at 17 significant digits, newline
/// terminated.
pub fn to_json(v: &Value) -> String {
    let mut s = String::new();
    write_json(v, &mut s);
    s.push('\n');
    s
}

fn write_json(v: &Value, s: &mut String) {
    match v {
        Value::Number(n) if n.is_f64() => s.push_str(&fmt17(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(xs) => {
            s.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                write_json(x, s);
            }
            s.push(']');
        }
        Value::Object(m) => {
            s.push('{');
            for (i, (k, x)) in m.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&Value::String(k.clone()).to_string());
                s.push(':');
                write_json(x, s);
            }
            s.push('}');
        }
        other => s.push_str(&other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("soliton").chain(args.iter().copied());
        let code = run_with_io(argv, &mut out, &mut err, LogLevel::Quiet);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_cigar() {
        let (code, out, _) =
            run_capture(&["classify", "--lambda", "0", "--mu", "-1", "--a0", "1", "--t0", "0", "--format", "json"]);
        assert_eq!(code, 0);
        assert!(out.starts_with(r#"{"family":"G1_CIGAR""#), "{out}");
    }

    #[test]
    fn missing_a0_is_usage() {
        let (code, out, err) = run_capture(&["integrate", "--lambda", "0", "--mu", "1"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("--a0"), "{err}");
    }

    #[test]
    fn malformed_numbers_are_usage() {
        for args in [
            &["integrate", "--lambda", "x", "--mu", "1", "--a0", "1"][..],
            &["integrate", "--lambda", "nan", "--mu", "1", "--a0", "1"],
            &["integrate", "--lambda", "0", "--mu", "1", "--a0", "1", "--window", "1"],
            &["catalog", "--family", "g13"],
            &["frobnicate"],
            &[],
        ] {
            assert_eq!(run_capture(args).0, 1, "{args:?}");
        }
    }

    #[test]
    fn mu_zero_is_an_input_error() {
        assert_eq!(run_capture(&["integrate", "--lambda", "1", "--mu", "0", "--a0", "1"]).0, 1);
    }

    #[test]
    fn config_values_yield_to_flags() {
        let map = parse_config("# run\nlambda = 0\nmu=-1 # cigar\n\n--a0 = 2\nr_range = 0,1\n").unwrap();
        assert_eq!(map["mu"], "-1");
        assert_eq!(map["a0"], "2");
        assert_eq!(map["r-range"], "0,1");
        assert!(parse_config("lambda 0").is_err());
    }

    #[test]
    fn json_floats_have_17_digits() {
        let s = to_json(&json!({"x": 0.1, "n": 3, "v": [1.0, -2.5e-300]}));
        assert_eq!(s, "{\"n\":3,\"v\":[1.0000000000000000e0,-2.5000000000000000e-300],\"x\":1.0000000000000001e-1}\n");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }
}
