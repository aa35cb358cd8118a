//! Command-line front end: `solve`, `classify`, `sweep`, and `verify`.
//!
//! All results go to standard output, diagnostics and a machine-readable
//! error record to standard error.  Exit codes: 0 success, 2 parse error,
//! 3 parameter out of range, 4 regime violation, 5 numeric pole.
//!
//! Rational literals are accepted as `p/q`, integers, or decimals; in
//! exact mode decimals are parsed exactly as rationals.  A flat key-value
//! config file (`key = value` per line, `#` comments) can supply any flag;
//! flags take precedence over the file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classify::{classify, ClassificationReport};
use crate::error::Error;
use crate::lambda::RegimeTag;
use crate::poly::jacobi_data;
use crate::scalar::{Mode, Scalar};
use crate::solver::{CoefficientTable, QHParams};
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PARAMETER: i32 = 3;
pub const EXIT_REGIME: i32 = 4;
pub const EXIT_POLE: i32 = 5;

/// A CLI failure carrying its exit code and machine-readable kind.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_PARSE,
            kind: "parse",
            message: message.into(),
        }
    }

    fn from_lib(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::IrrationalSqrt(_) => {
                (EXIT_PARAMETER, "parameter")
            }
            Error::Regime(_) | Error::HypothesisViolation(_) => (EXIT_REGIME, "regime"),
            Error::Pole(_)
            | Error::SingularMatrix { .. }
            | Error::NonFinite(_)
            | Error::Truncated { .. } => (EXIT_POLE, "pole"),
        };
        CliError {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qh",
    about = "Solve, verify, and classify the quadratic-harness recurrence system",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the coefficient system at one parameter point.
    Solve(PointArgs),
    /// Produce a full classification report for one parameter point.
    Classify(PointArgs),
    /// Classify every point of a parameter grid.
    Sweep(SweepArgs),
    /// Run the cross-validation suites on seeded pseudo-random points.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct PointArgs {
    /// Parameter sigma (default 0).
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Parameter tau (default 0).
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Parameter theta (default 0).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Parameter eta (default 0).
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Parameter q (default 0).
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Horizon N (default 64).
    #[arg(long)]
    n: Option<String>,
    /// Time t > 0; adds the Jacobi coefficients to the output.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Arithmetic mode: exact or float (default exact).
    #[arg(long)]
    mode: Option<String>,
    /// Output format: json or csv (default json).
    #[arg(long)]
    format: Option<String>,
    /// Flat key-value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// Grid for sigma: a value, a comma list, or lo:hi:step (default 0).
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Grid for tau (default 0).
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Grid for theta (default 0).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Grid for eta (default 0).
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Grid for q (default 0).
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Horizon N (default 64).
    #[arg(long)]
    n: Option<String>,
    /// Arithmetic mode: exact or float (default exact).
    #[arg(long)]
    mode: Option<String>,
    /// Output format: csv or json (default csv; json emits one object per line).
    #[arg(long)]
    format: Option<String>,
    /// Flat key-value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct VerifyArgs {
    /// Suite: closed-forms, residuals, favard, symmetry, appendix, or all.
    #[arg(long)]
    suite: Option<String>,
    /// Seed for the deterministic parameter sampler (default 0).
    #[arg(long)]
    seed: Option<String>,
    /// Horizon per check (default 32).
    #[arg(long)]
    n: Option<String>,
    /// Flat key-value config file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Entry point used by the `qh` binary.  Parses `std::env::args`, runs the
/// command, prints outputs, and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return EXIT_OK;
            }
            eprint!("{e}");
            print_error_record(&CliError::parse(e.to_string()));
            return EXIT_PARSE;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_point(&args, false),
        Command::Classify(args) => run_point(&args, true),
        Command::Sweep(args) => run_sweep(&args),
        Command::Verify(args) => run_verify(&args),
    };
    match result {
        Ok(output) => {
            print!("{output}");
            EXIT_OK
        }
        Err(e) => {
            print_error_record(&e);
            e.code
        }
    }
}

fn print_error_record(e: &CliError) {
    eprintln!(
        "{}",
        serde_json::json!({
            "error": { "code": e.code, "kind": e.kind, "message": e.message }
        })
    );
}

// ---------------------------------------------------------------------------
// Config files and flag resolution

fn load_config(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read config {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::parse(format!(
                "config {}:{}: expected `key = value`, got {raw:?}",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        const KNOWN: [&str; 11] = [
            "sigma", "tau", "theta", "eta", "q", "n", "t", "mode", "format", "seed", "suite",
        ];
        if !KNOWN.contains(&key.as_str()) {
            return Err(CliError::parse(format!(
                "config {}:{}: unknown key {key:?}",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn resolve<'a>(
    flag: &'a Option<String>,
    config: &'a BTreeMap<String, String>,
    key: &str,
) -> Option<&'a str> {
    flag.as_deref().or_else(|| config.get(key).map(|s| s.as_str()))
}

fn parse_scalar(text: &str, mode: Mode, what: &str) -> Result<Scalar, CliError> {
    Scalar::parse(text, mode).map_err(|e| CliError::parse(format!("{what}: {e}")))
}

fn parse_usize(text: &str, what: &str) -> Result<usize, CliError> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| CliError::parse(format!("{what}: cannot parse {text:?} as an integer")))
}

fn parse_mode(text: Option<&str>) -> Result<Mode, CliError> {
    match text {
        None => Ok(Mode::Exact),
        Some(s) => s.parse().map_err(|e: Error| CliError::parse(e.to_string())),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn parse_format(text: Option<&str>, default: Format) -> Result<Format, CliError> {
    match text {
        None => Ok(default),
        Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        Some(other) => Err(CliError::parse(format!(
            "unknown format {other:?}, expected \"json\" or \"csv\""
        ))),
    }
}

// ---------------------------------------------------------------------------
// Serialized shapes

#[derive(Serialize)]
struct ParamsOut {
    sigma: Scalar,
    tau: Scalar,
    theta: Scalar,
    eta: Scalar,
    q: Scalar,
}

impl ParamsOut {
    fn of(p: &QHParams) -> Self {
        ParamsOut {
            sigma: p.sigma.clone(),
            tau: p.tau.clone(),
            theta: p.theta.clone(),
            eta: p.eta.clone(),
            q: p.q.clone(),
        }
    }
}

#[derive(Serialize)]
struct JacobiOut {
    /// `b_0 .. b_N`.
    b: Vec<Scalar>,
    /// `c_hat_1 .. c_hat_N` (parallel to `chi`).
    c_hat: Vec<Scalar>,
}

#[derive(Serialize)]
struct ReportOut {
    regime: String,
    special_case: String,
    favard_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    favard_first_failure: Option<usize>,
    bounded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_point: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi_limit: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    known_process: Option<String>,
    notes: Vec<String>,
}

impl ReportOut {
    fn of(r: &ClassificationReport) -> Self {
        ReportOut {
            regime: r.regime.as_str().to_string(),
            special_case: r.special_case.as_str().to_string(),
            favard_ok: r.favard_ok,
            favard_first_failure: r.favard.first_failure,
            bounded: r.bounded,
            fixed_point: r.fixed_point.clone(),
            chi_limit: r.chi_limit.clone(),
            known_process: r.known_process.map(|k| k.as_str().to_string()),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Serialize)]
struct ErrorOut {
    code: i32,
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct SweepRowOut {
    params: ParamsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ReportOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorOut>,
}

#[derive(Serialize)]
struct PointOut {
    params: ParamsOut,
    mode: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Scalar>,
    lambda: Vec<Scalar>,
    gamma: Vec<Scalar>,
    delta: Vec<Scalar>,
    /// `chi_1 .. chi_N`.
    chi: Vec<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jacobi: Option<JacobiOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ReportOut>,
}

// ---------------------------------------------------------------------------
// solve / classify

fn point_params(args: &PointArgs, mode: Mode) -> Result<QHParams, CliError> {
    let config = load_config(&args.config)?;
    let get = |flag: &Option<String>, key: &str, default: &str| -> String {
        resolve(flag, &config, key).unwrap_or(default).to_string()
    };
    let sigma = parse_scalar(&get(&args.sigma, "sigma", "0"), mode, "sigma")?;
    let tau = parse_scalar(&get(&args.tau, "tau", "0"), mode, "tau")?;
    let theta = parse_scalar(&get(&args.theta, "theta", "0"), mode, "theta")?;
    let eta = parse_scalar(&get(&args.eta, "eta", "0"), mode, "eta")?;
    let q = parse_scalar(&get(&args.q, "q", "0"), mode, "q")?;
    QHParams::new(sigma, tau, theta, eta, q).map_err(CliError::from_lib)
}

fn run_point(args: &PointArgs, with_report: bool) -> Result<String, CliError> {
    let config = load_config(&args.config)?;
    let mode = parse_mode(resolve(&args.mode, &config, "mode"))?;
    let format = parse_format(resolve(&args.format, &config, "format"), Format::Json)?;
    let n = match resolve(&args.n, &config, "n") {
        Some(text) => parse_usize(text, "n")?,
        None => 64,
    };
    if n < 1 {
        return Err(CliError {
            code: EXIT_PARAMETER,
            kind: "parameter",
            message: "n must be >= 1".into(),
        });
    }
    let p = point_params(args, mode)?;
    let t = match resolve(&args.t, &config, "t") {
        Some(text) => Some(parse_scalar(text, mode, "t")?),
        None => None,
    };

    if !with_report && !p.is_admissible() {
        return Err(CliError {
            code: EXIT_REGIME,
            kind: "regime",
            message: format!(
                "solve requires q <= 1 - 2*sqrt(sigma*tau) (regime is {}); use classify or \
                 sweep to explore the oscillatory regime",
                p.regime().as_str()
            ),
        });
    }

    let table = CoefficientTable::build(&p, n).map_err(CliError::from_lib)?;
    let jacobi = match &t {
        Some(t) => {
            let jd = jacobi_data(&table, t).map_err(CliError::from_lib)?;
            Some(JacobiOut {
                b: jd.b.clone(),
                c_hat: jd.c_hat[1..].to_vec(),
            })
        }
        None => None,
    };
    let full_report = if with_report {
        Some(classify(&p, n).map_err(CliError::from_lib)?)
    } else {
        None
    };
    // CSV flattens a classification into one sweep-schema row; solve's CSV
    // is the coefficient table itself.
    if format == Format::Csv {
        if let Some(r) = &full_report {
            let point = [
                p.sigma.clone(),
                p.tau.clone(),
                p.theta.clone(),
                p.eta.clone(),
                p.q.clone(),
            ];
            return Ok(format!(
                "{SWEEP_HEADER}\n{}\n",
                sweep_csv_row(&point, Some(r), None)
            ));
        }
    }
    let out = PointOut {
        params: ParamsOut::of(&p),
        mode: mode.as_str().to_string(),
        n,
        t,
        lambda: table.lambda.clone(),
        gamma: table.gamma.clone(),
        delta: table.delta.clone(),
        chi: table.chi.clone(),
        jacobi,
        report: full_report.as_ref().map(ReportOut::of),
    };
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out)
                .map_err(|e| CliError::parse(format!("serialization failed: {e}")))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => Ok(point_csv(&out)),
    }
}

fn point_csv(out: &PointOut) -> String {
    let mut s = String::new();
    let has_jacobi = out.jacobi.is_some();
    s.push_str("n,lambda,gamma,delta,chi");
    if has_jacobi {
        s.push_str(",b,c_hat");
    }
    s.push('\n');
    for i in 0..=out.n {
        let chi = if i >= 1 {
            out.chi[i - 1].to_string()
        } else {
            String::new()
        };
        let _ = write!(
            s,
            "{i},{},{},{},{chi}",
            out.lambda[i], out.gamma[i], out.delta[i]
        );
        if let Some(j) = &out.jacobi {
            let c_hat = if i >= 1 {
                j.c_hat[i - 1].to_string()
            } else {
                String::new()
            };
            let _ = write!(s, ",{},{c_hat}", j.b[i]);
        }
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------------------------
// sweep

fn parse_grid(text: Option<&str>, mode: Mode, what: &str) -> Result<Vec<Scalar>, CliError> {
    let Some(text) = text else {
        return Ok(vec![Scalar::zero(mode)]);
    };
    let text = text.trim();
    if text.contains(',') {
        return text
            .split(',')
            .map(|piece| parse_scalar(piece, mode, what))
            .collect();
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::parse(format!(
                "{what}: range must be lo:hi:step, got {text:?}"
            )));
        }
        let lo = parse_scalar(parts[0], mode, what)?;
        let hi = parse_scalar(parts[1], mode, what)?;
        let step = parse_scalar(parts[2], mode, what)?;
        if !step.is_positive() {
            return Err(CliError::parse(format!(
                "{what}: range step must be > 0, got {step}"
            )));
        }
        let mut values = Vec::new();
        let mut v = lo;
        while v <= hi {
            values.push(v.clone());
            v = &v + &step;
            if values.len() > 100_000 {
                return Err(CliError::parse(format!(
                    "{what}: range produces more than 100000 points"
                )));
            }
        }
        return Ok(values);
    }
    Ok(vec![parse_scalar(text, mode, what)?])
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const SWEEP_HEADER: &str = "sigma,tau,theta,eta,q,regime,special_case,favard_ok,bounded,\
                            fixed_point,chi_limit,known_process,notes,error";

fn sweep_csv_row(
    point: &[Scalar; 5],
    report: Option<&ClassificationReport>,
    error: Option<&CliError>,
) -> String {
    let mut cols: Vec<String> = point.iter().map(|v| v.to_string()).collect();
    match report {
        Some(r) => {
            cols.push(r.regime.as_str().to_string());
            cols.push(r.special_case.as_str().to_string());
            cols.push(r.favard_ok.to_string());
            cols.push(r.bounded.to_string());
            cols.push(r.fixed_point.as_ref().map(|v| v.to_string()).unwrap_or_default());
            cols.push(r.chi_limit.as_ref().map(|v| v.to_string()).unwrap_or_default());
            cols.push(
                r.known_process
                    .map(|k| k.as_str().to_string())
                    .unwrap_or_default(),
            );
            cols.push(csv_field(&r.notes.join("; ")));
            cols.push(String::new());
        }
        None => {
            let e = error.expect("row has either a report or an error");
            // Out-of-range points still get a regime column.
            let regime = RegimeTag::classify(&point[4], &(&point[0] * &point[1]));
            cols.push(regime.as_str().to_string());
            cols.extend(std::iter::repeat_n(String::new(), 7));
            cols.push(csv_field(&format!("{}: {}", e.kind, e.message)));
        }
    }
    cols.join(",")
}

fn run_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let config = load_config(&args.config)?;
    let mode = parse_mode(resolve(&args.mode, &config, "mode"))?;
    let format = parse_format(resolve(&args.format, &config, "format"), Format::Csv)?;
    let n = match resolve(&args.n, &config, "n") {
        Some(text) => parse_usize(text, "n")?,
        None => 64,
    };
    let sigmas = parse_grid(resolve(&args.sigma, &config, "sigma"), mode, "sigma")?;
    let taus = parse_grid(resolve(&args.tau, &config, "tau"), mode, "tau")?;
    let thetas = parse_grid(resolve(&args.theta, &config, "theta"), mode, "theta")?;
    let etas = parse_grid(resolve(&args.eta, &config, "eta"), mode, "eta")?;
    let qs = parse_grid(resolve(&args.q, &config, "q"), mode, "q")?;

    let mut out = String::new();
    let empty =
        sigmas.is_empty() || taus.is_empty() || thetas.is_empty() || etas.is_empty() || qs.is_empty();
    if empty {
        return Ok(out);
    }
    if format == Format::Csv {
        out.push_str(SWEEP_HEADER);
        out.push('\n');
    }
    // Lexicographic point order: sigma, tau, theta, eta, q.  Points are
    // evaluated independently; per-point errors go into the row and never
    // abort the sweep.
    for sigma in &sigmas {
        for tau in &taus {
            for theta in &thetas {
                for eta in &etas {
                    for q in &qs {
                        let point = [
                            sigma.clone(),
                            tau.clone(),
                            theta.clone(),
                            eta.clone(),
                            q.clone(),
                        ];
                        let result = QHParams::new(
                            sigma.clone(),
                            tau.clone(),
                            theta.clone(),
                            eta.clone(),
                            q.clone(),
                        )
                        .and_then(|p| classify(&p, n))
                        .map_err(CliError::from_lib);
                        match format {
                            Format::Csv => {
                                let row = match &result {
                                    Ok(r) => sweep_csv_row(&point, Some(r), None),
                                    Err(e) => sweep_csv_row(&point, None, Some(e)),
                                };
                                out.push_str(&row);
                                out.push('\n');
                            }
                            Format::Json => {
                                let params = ParamsOut {
                                    sigma: point[0].clone(),
                                    tau: point[1].clone(),
                                    theta: point[2].clone(),
                                    eta: point[3].clone(),
                                    q: point[4].clone(),
                                };
                                let row = match &result {
                                    Ok(r) => SweepRowOut {
                                        params,
                                        report: Some(ReportOut::of(r)),
                                        error: None,
                                    },
                                    Err(e) => SweepRowOut {
                                        params,
                                        report: None,
                                        error: Some(ErrorOut {
                                            code: e.code,
                                            kind: e.kind,
                                            message: e.message.clone(),
                                        }),
                                    },
                                };
                                out.push_str(
                                    &serde_json::to_string(&row)
                                        .expect("sweep row serialization"),
                                );
                                out.push('\n');
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// verify

fn run_verify(args: &VerifyArgs) -> Result<String, CliError> {
    let config = load_config(&args.config)?;
    let suites = Suite::parse(resolve(&args.suite, &config, "suite").unwrap_or("all"))
        .map_err(|e| CliError::parse(e.to_string()))?;
    let seed = match resolve(&args.seed, &config, "seed") {
        Some(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::parse(format!("seed: cannot parse {text:?}")))?,
        None => 0,
    };
    let n = match resolve(&args.n, &config, "n") {
        Some(text) => parse_usize(text, "n")?,
        None => 32,
    };
    let mut out = String::new();
    let mut total_failures = 0usize;
    for suite in suites {
        let outcome = run_suite(suite, seed, n);
        total_failures += outcome.failures;
        let _ = write!(
            out,
            "suite={} checks={} failures={} result={}",
            outcome.suite,
            outcome.checks,
            outcome.failures,
            if outcome.passed() { "pass" } else { "fail" }
        );
        if let Some(cx) = &outcome.first_counterexample {
            let _ = write!(out, " first_counterexample={cx}");
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "overall={}",
        if total_failures == 0 { "pass" } else { "fail" }
    );
    Ok(out)
}
