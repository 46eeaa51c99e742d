//! The `jacobi-spectra` command line: `lambda`, `turan`, `bounds`,
//! `classify`, `fs` and `tv` over a model file.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 precondition violation,
//! 3 strict-mode diagnostic failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{bound_ratio, classify_model, Verdict, EVIDENCE_MARGIN, EVIDENCE_POINTS};
use crate::error::Error;
use crate::io::{csv_line, num, timestamp_header};
use crate::sequences::Jacobi;
use crate::spectrum::{finite_section, BoxRegion, SectionOptions, DEFAULT_BUDGET, MAX_DIM};
use crate::transfer::{lambda_scan, one_step, LambdaScanResult, LimitFamily, ScanLine, DEFAULT_REAL_TOL};
use crate::turan::{
    estimate_gamma, scalar_variation, transfer_variation, turan_trace, twisted_variation, ScalarSelector,
    TwistedVariationReport,
};

type C = Complex64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_STRICT: i32 = 3;

/// Bound-ratio slopes above this are flagged as unbounded growth or decay.
pub const SLOPE_FLAG: f64 = 0.1;

const DEFAULT_GRID: &str = "-4:4:0.01";
const DEFAULT_NMAX: usize = 10_000;
const DEFAULT_CLASSIFY_NMAX: usize = 20_000;

#[derive(Debug, Parser)]
#[command(
    name = "jacobi-spectra",
    version,
    about = "Spectral experiments for complex Jacobi matrices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Cmd {
    /// Scan the limit transfer matrices for the Λ set along a line.
    Lambda,
    /// Trace the shifted Turán determinants at one spectral parameter.
    Turan,
    /// Two-sided bound ratios of generalised eigenvectors over Λ.
    Bounds,
    /// Proper / improper verdict with predicted spectral claims.
    Classify,
    /// Eigenvalues of a finite section inside a box.
    Fs,
    /// Twisted total variation of a derived sequence.
    Tv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Args)]
struct Opts {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Model file (`{"model": {...}}`).
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    #[arg(long, global = true)]
    nmax: Option<usize>,
    /// Spectral parameter `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    z: Option<String>,
    /// Scan grid `t0:t1:step`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    offset: Option<usize>,
    /// Direction of the scan line, or the Turán phase, as `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exit with code 3 when a diagnostic fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Accept incomplete finite-section results.
    #[arg(long, global = true)]
    partial: bool,
    /// Omit the timestamp comment line from CSV output.
    #[arg(long, global = true)]
    no_header: bool,
    /// Prior `lambda --format json` output to draw `z` from.
    #[arg(long, global = true)]
    scan: Option<PathBuf>,
    /// Finite-section dimension.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Finite-section box `re0:re1:im0:im1`.
    #[arg(long = "box", global = true, allow_hyphen_values = true)]
    region: Option<String>,
    /// Cell budget of the finite-section search.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Sequence for `tv`.
    #[arg(long, global = true)]
    selector: Option<String>,
}

/// File form of the options; every field is optional and flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<PathBuf>,
    pub nmax: Option<usize>,
    pub z: Option<String>,
    pub grid: Option<String>,
    pub offset: Option<usize>,
    pub gamma: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict: Option<bool>,
    pub partial: Option<bool>,
    pub no_header: Option<bool>,
    pub scan: Option<PathBuf>,
    pub dim: Option<usize>,
    #[serde(rename = "box")]
    pub region: Option<String>,
    pub budget: Option<usize>,
    pub selector: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Precondition(String),
    Strict(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Self::Io(_) => EXIT_IO,
            Self::Precondition(_) => EXIT_PRECONDITION,
            Self::Strict(_) => EXIT_STRICT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Io(m) | Self::Precondition(m) | Self::Strict(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) => Self::Io(e.to_string()),
            _ => Self::Precondition(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Io(msg.into())
}

fn precondition(msg: impl Into<String>) -> Failure {
    Failure::Precondition(msg.into())
}

pub fn parse_complex(s: &str) -> Option<C> {
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next()?.ok()?;
    let im = match parts.next() {
        Some(p) => p.ok()?,
        None => 0.0,
    };
    parts.next().is_none().then_some(C::new(re, im))
}

fn parse_floats(s: &str, n: usize) -> Option<Vec<f64>> {
    let v: Vec<f64> = s.split(':').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    (v.len() == n).then_some(v)
}

/// Options after merging the config file under the flags.
struct Settings {
    cmd: Cmd,
    model: Jacobi,
    nmax: Option<usize>,
    z: Option<C>,
    grid: Option<[f64; 3]>,
    offset: Option<usize>,
    gamma: Option<C>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Format,
    strict: bool,
    partial: bool,
    header: bool,
    scan: Option<PathBuf>,
    dim: Option<usize>,
    region: Option<BoxRegion>,
    budget: Option<usize>,
    selector: Option<String>,
}

fn resolve(cmd: Cmd, o: Opts) -> Outcome<Settings> {
    let (cfg, base) = match &o.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", p.display())))?;
            (cfg, p.parent().map(Path::to_path_buf))
        }
        None => (RunConfig::default(), None),
    };
    // relative paths in a config file are relative to the file
    let rebase = |p: PathBuf| match &base {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p,
    };
    let model_path = o
        .model
        .or_else(|| cfg.model.map(rebase))
        .ok_or_else(|| bad("--model is required"))?;
    let text = fs::read_to_string(&model_path).map_err(|e| bad(format!("{}: {e}", model_path.display())))?;
    let model = Jacobi::from_json(&text).map_err(|e| match e {
        Error::Json(j) => bad(format!("{}: {j}", model_path.display())),
        other => Failure::from(other),
    })?;

    let z = match o.z.or(cfg.z) {
        Some(s) => Some(parse_complex(&s).ok_or_else(|| bad(format!("bad --z `{s}`")))?),
        None => None,
    };
    let gamma = match o.gamma.or(cfg.gamma) {
        Some(s) => Some(parse_complex(&s).ok_or_else(|| bad(format!("bad --gamma `{s}`")))?),
        None => None,
    };
    let grid = match o.grid.or(cfg.grid) {
        Some(s) => {
            let v = parse_floats(&s, 3).ok_or_else(|| bad(format!("bad --grid `{s}`, expected t0:t1:step")))?;
            Some([v[0], v[1], v[2]])
        }
        None => None,
    };
    let region = match o.region.or(cfg.region) {
        Some(s) => {
            let v = parse_floats(&s, 4).ok_or_else(|| bad(format!("bad --box `{s}`, expected re0:re1:im0:im1")))?;
            Some(BoxRegion::new(v[0], v[1], v[2], v[3])?)
        }
        None => None,
    };
    let tol = o.tol.or(cfg.tol);
    if tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(precondition("--tol must be positive"));
    }
    let nmax = o.nmax.or(cfg.nmax);
    if nmax == Some(0) {
        return Err(precondition("--nmax must be at least 1"));
    }
    let format = o.format.or(cfg.format).unwrap_or(match cmd {
        Cmd::Classify => Format::Json,
        _ => Format::Csv,
    });
    Ok(Settings {
        cmd,
        model,
        nmax,
        z,
        grid,
        offset: o.offset.or(cfg.offset),
        gamma,
        tol,
        out: o.out.or_else(|| cfg.out.map(rebase)),
        format,
        strict: o.strict || cfg.strict.unwrap_or(false),
        partial: o.partial || cfg.partial.unwrap_or(false),
        header: !(o.no_header || cfg.no_header.unwrap_or(false)),
        scan: o.scan.or_else(|| cfg.scan.map(rebase)),
        dim: o.dim.or(cfg.dim),
        region,
        budget: o.budget.or(cfg.budget),
        selector: o.selector.or(cfg.selector),
    })
}

/// Rendered output plus an optional diagnostic failure to report after it
/// has been written.
struct Report {
    body: String,
    /// Extra file written next to `--out` as `<out>.<suffix>`, or to stderr.
    side: Option<(&'static str, String)>,
    strict_failure: Option<String>,
}

impl Report {
    fn plain(body: String) -> Self {
        Self {
            body,
            side: None,
            strict_failure: None,
        }
    }
}

impl Settings {
    fn header(&self) -> Option<String> {
        self.header.then(timestamp_header)
    }

    fn line(&self) -> Outcome<ScanLine> {
        let g = self.grid.unwrap_or_else(|| {
            let v = parse_floats(DEFAULT_GRID, 3).expect("default grid");
            [v[0], v[1], v[2]]
        });
        let gamma = self.gamma.unwrap_or(C::new(1.0, 0.0));
        Ok(ScanLine {
            gamma: [gamma.re, gamma.im],
            t0: g[0],
            t1: g[1],
            step: g[2],
        })
    }

    fn limit_offsets(&self) -> Outcome<Vec<usize>> {
        let all: Vec<usize> = LimitFamily::offsets(&self.model)?.collect();
        match self.offset {
            Some(i) if all.contains(&i) => Ok(vec![i]),
            Some(i) => Err(Error::OffsetOutOfRange {
                offset: i,
                min: *all.first().unwrap_or(&0),
                max: *all.last().unwrap_or(&0),
            }
            .into()),
            None => Ok(all),
        }
    }

    fn scans(&self) -> Outcome<Vec<LambdaScanResult>> {
        let line = self.line()?;
        let tol = self.tol.unwrap_or(DEFAULT_REAL_TOL);
        self.limit_offsets()?
            .into_iter()
            .map(|i| {
                let family = LimitFamily::for_model(&self.model, i)?;
                let mut scan = lambda_scan(|z| family.at(z), line, tol)?;
                scan.offset = Some(i);
                Ok(scan)
            })
            .collect()
    }

    fn json<T: Serialize>(value: &T) -> Outcome<String> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| bad(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Prepends an `offset` column to a CSV body that starts with its column
/// line.
fn with_offset(csv: &str, offset: usize, include_columns: bool) -> String {
    let mut out = String::new();
    for (j, line) in csv.lines().enumerate() {
        if j == 0 {
            if include_columns {
                out.push_str("offset,");
                out.push_str(line);
                out.push('\n');
            }
        } else {
            out.push_str(&format!("{offset},{line}\n"));
        }
    }
    out
}

fn cmd_lambda(s: &Settings) -> Outcome<Report> {
    let scans = s.scans()?;
    Ok(Report::plain(match s.format {
        Format::Json => Settings::json(&scans)?,
        Format::Csv => {
            let mut body = s.header().unwrap_or_default();
            for (j, scan) in scans.iter().enumerate() {
                body.push_str(&with_offset(&scan.to_csv(None), scan.offset.unwrap_or(0), j == 0));
            }
            body
        }
    }))
}

/// Midpoint of the widest interval for `offset` in a saved scan.
fn z_from_scan(path: &Path, offset: usize) -> Outcome<C> {
    let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    let scans: Vec<LambdaScanResult> =
        serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    scans
        .iter()
        .filter(|sc| sc.offset.is_none_or(|i| i == offset))
        .flat_map(|sc| {
            sc.intervals
                .iter()
                .filter(|iv| !iv.isolated)
                .map(move |iv| (iv.right - iv.left, sc.line.point(0.5 * (iv.left + iv.right))))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, z)| z)
        .ok_or_else(|| precondition(format!("no Λ interval for offset {offset} in {}", path.display())))
}

fn default_offset(s: &Settings) -> usize {
    s.offset
        .or_else(|| LimitFamily::offsets(&s.model).ok().map(|r| *r.start()))
        .unwrap_or(0)
}

fn cmd_turan(s: &Settings) -> Outcome<Report> {
    let offset = default_offset(s);
    let z = match (s.z, &s.scan) {
        (Some(z), _) => z,
        (None, Some(p)) => z_from_scan(p, offset)?,
        (None, None) => return Err(precondition("turan needs --z or --scan")),
    };
    let period = s.model.period();
    let gamma = match s.gamma {
        Some(g) => g,
        None => estimate_gamma(&s.model, offset % period)?.gamma,
    };
    let alpha = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let trace = turan_trace(
        &s.model,
        offset,
        period,
        gamma,
        z,
        alpha,
        s.nmax.unwrap_or(DEFAULT_NMAX),
    )?;
    let strict_failure = (!trace.is_healthy()).then(|| {
        format!(
            "Turán trace not healthy: converged={} sign_change={} form_degenerate={}",
            trace.converged, trace.sign_change, trace.form_degenerate
        )
    });
    Ok(match s.format {
        Format::Json => Report {
            body: Settings::json(&trace)?,
            side: None,
            strict_failure,
        },
        Format::Csv => Report {
            body: trace.to_csv(s.header().as_deref()),
            side: Some(("summary.json", Settings::json(&trace.summary())?)),
            strict_failure,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
struct BoundsRow {
    offset: usize,
    z: C,
    ln_inf: f64,
    ln_sup: f64,
    spread: f64,
    slope: Option<f64>,
    flagged: bool,
}

fn cmd_bounds(s: &Settings) -> Outcome<Report> {
    let period = s.model.period();
    let nmax = s.nmax.unwrap_or(DEFAULT_NMAX);
    let points: Vec<(usize, C)> = match s.z {
        Some(z) => vec![(default_offset(s), z)],
        None => {
            let scans = s.scans()?;
            let pts: Vec<(usize, C)> = scans
                .iter()
                .flat_map(|sc| {
                    sc.interior_points(EVIDENCE_POINTS, EVIDENCE_MARGIN)
                        .into_iter()
                        .map(|z| (sc.offset.unwrap_or(0), z))
                })
                .collect();
            if pts.is_empty() {
                return Err(precondition("Λ is empty on the scanned line"));
            }
            pts
        }
    };
    let rows = points
        .iter()
        .map(|&(offset, z)| {
            let r = bound_ratio(&s.model, offset % period, period, z, nmax)?;
            Ok(BoundsRow {
                offset,
                z,
                ln_inf: r.window.ln_inf,
                ln_sup: r.window.ln_sup,
                spread: r.spread(),
                slope: r.slope,
                flagged: r.slope.is_none_or(|x| x.abs() > SLOPE_FLAG),
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let strict_failure = (flagged > 0).then(|| format!("{flagged} bound-ratio slope(s) above {SLOPE_FLAG}"));
    let body = match s.format {
        Format::Json => Settings::json(&rows)?,
        Format::Csv => {
            let mut body = s.header().unwrap_or_default();
            body.push_str("offset,re_z,im_z,ln_inf,ln_sup,spread,slope,flagged\n");
            for r in &rows {
                body.push_str(&csv_line(&[
                    r.offset.to_string(),
                    num(r.z.re),
                    num(r.z.im),
                    num(r.ln_inf),
                    num(r.ln_sup),
                    num(r.spread),
                    r.slope.map(num).unwrap_or_default(),
                    (r.flagged as u8).to_string(),
                ]));
            }
            body
        }
    };
    Ok(Report {
        body,
        side: None,
        strict_failure,
    })
}

fn cmd_classify(s: &Settings) -> Outcome<Report> {
    let report = classify_model(
        &s.model,
        s.line()?,
        s.tol.unwrap_or(DEFAULT_REAL_TOL),
        s.nmax.unwrap_or(DEFAULT_CLASSIFY_NMAX),
    )?;
    let strict_failure = (report.verdict == Verdict::Inconclusive).then(|| "verdict inconclusive".to_string());
    let body = match s.format {
        Format::Json => Settings::json(&report)?,
        Format::Csv => {
            let mut body = s.header().unwrap_or_default();
            body.push_str("verdict,claim,domain,evidence,hypothesis\n");
            let verdict = format!("{:?}", report.verdict);
            if report.claims.is_empty() {
                body.push_str(&csv_line(&[
                    verdict.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]));
            }
            for c in &report.claims {
                body.push_str(&csv_line(&[
                    verdict.clone(),
                    quote(&c.label),
                    quote(c.domain.as_deref().unwrap_or("")),
                    quote(&c.evidence),
                    quote(&c.hypothesis),
                ]));
            }
            body
        }
    };
    Ok(Report {
        body,
        side: None,
        strict_failure,
    })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn cmd_fs(s: &Settings) -> Outcome<Report> {
    let dim = s.dim.ok_or_else(|| precondition("fs needs --dim"))?;
    if dim > MAX_DIM {
        return Err(precondition(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    let region = s.region.ok_or_else(|| precondition("fs needs --box re0:re1:im0:im1"))?;
    let opts = SectionOptions {
        tol: s.tol.unwrap_or(SectionOptions::default().tol),
        budget: s.budget.unwrap_or(DEFAULT_BUDGET),
    };
    let est = finite_section(&s.model, dim, region, opts)?;
    if !est.complete && !s.partial {
        return Err(precondition(format!(
            "finite section incomplete: {} of {} roots after {} cells (use --partial)",
            est.root_count(),
            est.expected,
            est.cells
        )));
    }
    Ok(Report::plain(match s.format {
        Format::Json => Settings::json(&est)?,
        Format::Csv => est.to_csv(s.header().as_deref()),
    }))
}

/// Selectors of `tv` beyond the scalar coefficient sequences.
const MATRIX_SELECTORS: [&str; 3] = ["b_step", "x", "x_weighted"];

fn cmd_tv(s: &Settings) -> Outcome<Report> {
    let name = s
        .selector
        .as_deref()
        .ok_or_else(|| precondition("tv needs --selector"))?;
    let scalar = ScalarSelector::parse(name);
    if scalar.is_none() && !MATRIX_SELECTORS.contains(&name) {
        let known: Vec<&str> = ScalarSelector::ALL
            .iter()
            .map(|x| x.name())
            .chain(MATRIX_SELECTORS)
            .collect();
        return Err(precondition(format!(
            "unknown selector `{name}`, expected one of {}",
            known.join(", ")
        )));
    }
    let period = s.model.period();
    let nmax = s.nmax.unwrap_or(DEFAULT_NMAX);
    let z = s.z.unwrap_or_default();
    let offsets: Vec<usize> = match s.offset {
        Some(i) if i < period => vec![i],
        Some(i) => {
            return Err(Error::OffsetOutOfRange {
                offset: i,
                min: 0,
                max: period - 1,
            }
            .into())
        }
        None => (0..period).collect(),
    };
    let reports = offsets
        .iter()
        .map(|&i| -> Outcome<TwistedVariationReport> {
            Ok(match (scalar, name) {
                (Some(sel), _) => {
                    let gamma = match s.gamma {
                        Some(g) => g,
                        None => estimate_gamma(&s.model, i)?.gamma,
                    };
                    scalar_variation(&s.model, sel, gamma, i, period, nmax)?
                }
                (None, "b_step") => twisted_variation(|k| one_step(&s.model, k, z), i, period, nmax)?,
                (None, "x") => transfer_variation(&s.model, z, false, i, period, nmax)?,
                (None, _) => transfer_variation(&s.model, z, true, i, period, nmax)?,
            })
        })
        .collect::<Outcome<Vec<_>>>()?;
    let body = match s.format {
        Format::Json => Settings::json(&reports)?,
        Format::Csv => {
            let mut body = s.header().unwrap_or_default();
            body.push_str("offset,n,partial_sum\n");
            for r in &reports {
                for (n, v) in &r.partial_sums {
                    body.push_str(&csv_line(&[r.offset.to_string(), n.to_string(), num(*v)]));
                }
            }
            body
        }
    };
    Ok(Report::plain(body))
}

fn write_out(s: &Settings, report: &Report) -> Outcome<()> {
    match &s.out {
        Some(path) => {
            fs::write(path, &report.body).map_err(|e| bad(format!("{}: {e}", path.display())))?;
            if let Some((suffix, text)) = &report.side {
                let mut side = path.clone().into_os_string();
                side.push(format!(".{suffix}"));
                fs::write(&side, text).map_err(|e| bad(format!("{}: {e}", PathBuf::from(side.clone()).display())))?;
            }
        }
        None => {
            std::io::stdout()
                .write_all(report.body.as_bytes())
                .map_err(|e| bad(e.to_string()))?;
            if let Some((_, text)) = &report.side {
                eprint!("{text}");
            }
        }
    }
    Ok(())
}

fn execute(s: &Settings) -> Outcome<()> {
    let report = match s.cmd {
        Cmd::Lambda => cmd_lambda(s),
        Cmd::Turan => cmd_turan(s),
        Cmd::Bounds => cmd_bounds(s),
        Cmd::Classify => cmd_classify(s),
        Cmd::Fs => cmd_fs(s),
        Cmd::Tv => cmd_tv(s),
    }?;
    write_out(s, &report)?;
    match (&report.strict_failure, s.strict) {
        (Some(msg), true) => Err(Failure::Strict(msg.clone())),
        (Some(msg), false) => {
            eprintln!("warning: {msg}");
            Ok(())
        }
        (None, _) => Ok(()),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("JS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_IO } else { EXIT_OK };
        }
    };
    configure_threads();
    let result = resolve(cli.cmd, cli.opts).and_then(|s| execute(&s));
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
